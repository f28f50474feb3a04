/**
 * Minimal classfile writer.
 *
 * Specs are declarative: methods carry canonical instruction tuples with
 * string labels; the writer picks encodings (iconst/bipush/sipush/ldc,
 * xload_N), resolves branch offsets, and computes max_stack/max_locals
 * with a little abstract interpreter.
 */

import { ByteWriter, mutf8 } from "./bytes";

export type Ins = [string, ...unknown[]];

export interface AnnotationSpec {
  type: string;
  elements?: Record<string, ElementValue>;
}

export type ElementValue = string | number | boolean | AnnotationSpec | ElementValue[];

export interface FieldSpec {
  name: string;
  descriptor: string;
  access?: number;
}

export interface MethodSpec {
  name: string;
  descriptor: string;
  access?: number;
  code?: Ins[];
  annotations?: AnnotationSpec[];
  paramNames?: string[];
}

export interface ClassSpec {
  name: string;
  superName?: string;
  version?: number;
  access?: number;
  interfaces?: string[];
  fields?: FieldSpec[];
  methods?: MethodSpec[];
  defaultInit?: boolean;
}

export const ACC_PUBLIC = 0x0001;
export const ACC_PRIVATE = 0x0002;
export const ACC_STATIC = 0x0008;
export const ACC_FINAL = 0x0010;
export const ACC_VARARGS = 0x0080;
export const ACC_INTERFACE = 0x0200;
export const ACC_ABSTRACT = 0x0400;
export const ACC_ANNOTATION = 0x2000;

const OPCODES: Record<string, number> = {
  nop: 0x00, aconst_null: 0x01, bipush: 0x10, sipush: 0x11,
  ldc: 0x12, ldc_w: 0x13, ldc2_w: 0x14,
  iload: 0x15, lload: 0x16, fload: 0x17, dload: 0x18, aload: 0x19,
  iaload: 0x2e, laload: 0x2f, faload: 0x30, daload: 0x31, aaload: 0x32,
  baload: 0x33, caload: 0x34, saload: 0x35,
  istore: 0x36, lstore: 0x37, fstore: 0x38, dstore: 0x39, astore: 0x3a,
  iastore: 0x4f, lastore: 0x50, fastore: 0x51, dastore: 0x52, aastore: 0x53,
  bastore: 0x54, castore: 0x55, sastore: 0x56,
  pop: 0x57, pop2: 0x58, dup: 0x59, dup_x1: 0x5a, dup_x2: 0x5b,
  dup2: 0x5c, dup2_x1: 0x5d, dup2_x2: 0x5e, swap: 0x5f,
  iadd: 0x60, ladd: 0x61, fadd: 0x62, dadd: 0x63,
  isub: 0x64, lsub: 0x65, fsub: 0x66, dsub: 0x67,
  imul: 0x68, lmul: 0x69, fmul: 0x6a, dmul: 0x6b,
  idiv: 0x6c, ldiv: 0x6d, fdiv: 0x6e, ddiv: 0x6f,
  irem: 0x70, lrem: 0x71, frem: 0x72, drem: 0x73,
  ineg: 0x74, lneg: 0x75, fneg: 0x76, dneg: 0x77,
  ishl: 0x78, lshl: 0x79, ishr: 0x7a, lshr: 0x7b, iushr: 0x7c, lushr: 0x7d,
  iand: 0x7e, land: 0x7f, ior: 0x80, lor: 0x81, ixor: 0x82, lxor: 0x83,
  iinc: 0x84,
  i2l: 0x85, i2f: 0x86, i2d: 0x87, l2i: 0x88, l2f: 0x89, l2d: 0x8a,
  f2i: 0x8b, f2l: 0x8c, f2d: 0x8d, d2i: 0x8e, d2l: 0x8f, d2f: 0x90,
  i2b: 0x91, i2c: 0x92, i2s: 0x93,
  lcmp: 0x94, fcmpl: 0x95, fcmpg: 0x96, dcmpl: 0x97, dcmpg: 0x98,
  ifeq: 0x99, ifne: 0x9a, iflt: 0x9b, ifge: 0x9c, ifgt: 0x9d, ifle: 0x9e,
  if_icmpeq: 0x9f, if_icmpne: 0xa0, if_icmplt: 0xa1, if_icmpge: 0xa2,
  if_icmpgt: 0xa3, if_icmple: 0xa4, if_acmpeq: 0xa5, if_acmpne: 0xa6,
  goto: 0xa7, tableswitch: 0xaa, lookupswitch: 0xab,
  ireturn: 0xac, lreturn: 0xad, freturn: 0xae, dreturn: 0xaf, areturn: 0xb0,
  return: 0xb1,
  getstatic: 0xb2, putstatic: 0xb3, getfield: 0xb4, putfield: 0xb5,
  invokevirtual: 0xb6, invokespecial: 0xb7, invokestatic: 0xb8,
  invokeinterface: 0xb9,
  new: 0xbb, newarray: 0xbc, anewarray: 0xbd, arraylength: 0xbe,
  checkcast: 0xc0, ifnull: 0xc6, ifnonnull: 0xc7,
};

const NEWARRAY_CODES: Record<string, number> = {
  Z: 4, C: 5, F: 6, D: 7, B: 8, S: 9, I: 10, J: 11,
};

const BRANCHES = new Set([
  "ifeq", "ifne", "iflt", "ifge", "ifgt", "ifle",
  "if_icmpeq", "if_icmpne", "if_icmplt", "if_icmpge", "if_icmpgt", "if_icmple",
  "if_acmpeq", "if_acmpne", "ifnull", "ifnonnull", "goto",
]);

class ConstantPool {
  private entries: ByteWriter[] = [];
  private index = new Map<string, number>();
  private next = 1;

  private intern(key: string, slots: number, fill: (w: ByteWriter) => void): number {
    const found = this.index.get(key);
    if (found !== undefined) return found;
    const w = new ByteWriter();
    fill(w);
    this.entries.push(w);
    const at = this.next;
    this.index.set(key, at);
    this.next += slots;
    return at;
  }

  utf8(text: string): number {
    return this.intern(`u:${text}`, 1, (w) => {
      const data = mutf8(text);
      w.u1(1).u2(data.length).raw(data);
    });
  }

  klass(dotted: string): number {
    const internal = dotted.startsWith("[") ? dotted : dotted.replace(/\./g, "/");
    const name = this.utf8(internal);
    return this.intern(`c:${internal}`, 1, (w) => w.u1(7).u2(name));
  }

  integer(v: number): number {
    return this.intern(`i:${v}`, 1, (w) => w.u1(3).s4(v));
  }

  nameAndType(name: string, desc: string): number {
    const n = this.utf8(name);
    const d = this.utf8(desc);
    return this.intern(`nt:${name}:${desc}`, 1, (w) => w.u1(12).u2(n).u2(d));
  }

  member(tag: number, owner: string, name: string, desc: string): number {
    const c = this.klass(owner);
    const nt = this.nameAndType(name, desc);
    return this.intern(`m:${tag}:${owner}:${name}:${desc}`, 1,
      (w) => w.u1(tag).u2(c).u2(nt));
  }

  dump(): ByteWriter {
    const w = new ByteWriter();
    w.u2(this.next);
    for (const entry of this.entries) w.raw(entry.bytes());
    return w;
  }
}

function parseDescriptor(desc: string): { params: string[]; ret: string } {
  const params: string[] = [];
  let i = 1;
  while (desc[i] !== ")") {
    const start = i;
    while (desc[i] === "[") i++;
    if (desc[i] === "L") i = desc.indexOf(";", i);
    i++;
    params.push(desc.slice(start, i));
  }
  return { params, ret: desc.slice(i + 1) };
}

function slotWidth(t: string): number {
  return t === "J" || t === "D" ? 2 : 1;
}

type Branded = { offset: number };

function encodeIns(pool: ConstantPool, ins: Ins, offset: number,
                   labels: Map<string, number>): ByteWriter {
  const w = new ByteWriter();
  const [mn, ...ops] = ins;
  const branchTo = (label: string, wide = false) => {
    const target = labels.get(label);
    if (target === undefined) throw new Error(`undefined label ${label}`);
    return target - offset;
  };
  switch (mn) {
    case "push": {
      const kind = ops[0] as string;
      const value = ops[1] as number;
      if (kind === "int") {
        if (value >= -1 && value <= 5) return w.u1(0x03 + value);
        if (value >= -128 && value <= 127) return w.u1(OPCODES.bipush).s1(value);
        if (value >= -32768 && value <= 32767) return w.u1(OPCODES.sipush).s2(value);
        const idx = pool.integer(value);
        if (idx <= 255) return w.u1(OPCODES.ldc).u1(idx);
        return w.u1(OPCODES.ldc_w).u2(idx);
      }
      if (kind === "null") return w.u1(OPCODES.aconst_null);
      throw new Error(`unsupported push kind ${kind}`);
    }
    case "iload": case "lload": case "fload": case "dload": case "aload":
    case "istore": case "lstore": case "fstore": case "dstore": case "astore": {
      const idx = ops[0] as number;
      if (idx <= 3) {
        const base: Record<string, number> = {
          iload: 0x1a, lload: 0x1e, fload: 0x22, dload: 0x26, aload: 0x2a,
          istore: 0x3b, lstore: 0x3f, fstore: 0x43, dstore: 0x47, astore: 0x4b,
        };
        return w.u1(base[mn] + idx);
      }
      return w.u1(OPCODES[mn]).u1(idx);
    }
    case "iinc":
      return w.u1(OPCODES.iinc).u1(ops[0] as number).s1(ops[1] as number);
    case "getstatic": case "putstatic": case "getfield": case "putfield": {
      const [owner, name, desc] = ops[0] as [string, string, string];
      return w.u1(OPCODES[mn]).u2(pool.member(9, owner, name, desc));
    }
    case "invokevirtual": case "invokespecial": case "invokestatic": {
      const [owner, name, desc] = ops[0] as [string, string, string];
      return w.u1(OPCODES[mn]).u2(pool.member(10, owner, name, desc));
    }
    case "invokeinterface": {
      const [owner, name, desc] = ops[0] as [string, string, string];
      const { params } = parseDescriptor(desc);
      const count = 1 + params.reduce((n, p) => n + slotWidth(p), 0);
      return w.u1(OPCODES[mn]).u2(pool.member(11, owner, name, desc)).u1(count).u1(0);
    }
    case "new": case "anewarray": case "checkcast":
      return w.u1(OPCODES[mn]).u2(pool.klass(ops[0] as string));
    case "newarray":
      return w.u1(OPCODES.newarray).u1(NEWARRAY_CODES[ops[0] as string]);
    case "tableswitch": {
      const [dflt, low, targets] = ops as [string, number, string[]];
      w.u1(OPCODES.tableswitch);
      while ((offset + w.length) % 4 !== 0) w.u1(0);
      w.s4(branchTo(dflt)).s4(low).s4(low + targets.length - 1);
      for (const t of targets) w.s4(branchTo(t));
      return w;
    }
    case "lookupswitch": {
      const [dflt, pairs] = ops as [string, Array<[number, string]>];
      w.u1(OPCODES.lookupswitch);
      while ((offset + w.length) % 4 !== 0) w.u1(0);
      w.s4(branchTo(dflt)).s4(pairs.length);
      for (const [match, target] of [...pairs].sort((a, b) => a[0] - b[0])) {
        w.s4(match).s4(branchTo(target));
      }
      return w;
    }
    default:
      if (BRANCHES.has(mn)) {
        return w.u1(OPCODES[mn]).s2(branchTo(ops[0] as string));
      }
      if (OPCODES[mn] === undefined) throw new Error(`unknown instruction ${mn}`);
      return w.u1(OPCODES[mn]);
  }
}

function assemble(pool: ConstantPool, code: Ins[]): Uint8Array {
  const labels = new Map<string, number>();
  for (const ins of code) if (ins[0] === "label") labels.set(ins[1] as string, 0);
  // iterate until offsets stabilize (switch padding is position dependent)
  for (let round = 0; round < 10; round++) {
    const w = new ByteWriter();
    const seen = new Map<string, number>();
    for (const ins of code) {
      if (ins[0] === "label") {
        seen.set(ins[1] as string, w.length);
      } else {
        w.raw(encodeIns(pool, ins, w.length, labels).bytes());
      }
    }
    let stable = true;
    for (const [name, at] of seen) {
      if (labels.get(name) !== at) stable = false;
      labels.set(name, at);
    }
    if (stable) return w.bytes();
  }
  throw new Error("code layout did not stabilize");
}

function instructionDelta(ins: Ins): number {
  const [mn, ...ops] = ins;
  if (mn === "push") return ops[0] === "long" || ops[0] === "double" ? 2 : 1;
  if (/^[ifa]load$/.test(mn)) return 1;
  if (/^[ld]load$/.test(mn)) return 2;
  if (/^[ifa]store$/.test(mn)) return -1;
  if (/^[ld]store$/.test(mn)) return -2;
  if (/^if_[ia]cmp/.test(mn)) return -2;
  if (/^if(eq|ne|lt|ge|gt|le|null|nonnull)$/.test(mn)) return -1;
  if (mn === "goto" || mn === "return" || mn === "nop" || mn === "iinc") return 0;
  if (mn === "aconst_null" || mn === "new") return 1;
  if (/^[ifa]return$/.test(mn) || mn === "tableswitch" || mn === "lookupswitch") return -1;
  if (/^[ld]return$/.test(mn)) return -2;
  const fixed: Record<string, number> = {
    iaload: -1, faload: -1, aaload: -1, baload: -1, caload: -1, saload: -1,
    laload: 0, daload: 0,
    iastore: -3, fastore: -3, aastore: -3, bastore: -3, castore: -3, sastore: -3,
    lastore: -4, dastore: -4,
    pop: -1, pop2: -2, dup: 1, dup_x1: 1, dup_x2: 1, dup2: 2, dup2_x1: 2,
    dup2_x2: 2, swap: 0,
    iadd: -1, isub: -1, imul: -1, idiv: -1, irem: -1,
    fadd: -1, fsub: -1, fmul: -1, fdiv: -1, frem: -1,
    ladd: -2, lsub: -2, lmul: -2, ldiv: -2, lrem: -2,
    dadd: -2, dsub: -2, dmul: -2, ddiv: -2, drem: -2,
    ineg: 0, lneg: 0, fneg: 0, dneg: 0,
    ishl: -1, ishr: -1, iushr: -1, lshl: -1, lshr: -1, lushr: -1,
    iand: -1, ior: -1, ixor: -1, land: -2, lor: -2, lxor: -2,
    i2l: 1, i2f: 0, i2d: 1, l2i: -1, l2f: -1, l2d: 0,
    f2i: 0, f2l: 1, f2d: 1, d2i: -1, d2l: 0, d2f: -1,
    i2b: 0, i2c: 0, i2s: 0,
    lcmp: -3, fcmpl: -1, fcmpg: -1, dcmpl: -3, dcmpg: -3,
    newarray: 0, anewarray: 0, arraylength: 0, checkcast: 0,
  };
  if (mn in fixed) return fixed[mn];
  if (mn.startsWith("invoke")) {
    const [owner, name, desc] = ops[0] as [string, string, string];
    const { params, ret } = parseDescriptor(desc);
    let pops = params.reduce((n, p) => n + slotWidth(p), 0);
    if (mn !== "invokestatic") pops += 1;
    return (ret === "V" ? 0 : slotWidth(ret)) - pops;
  }
  if (mn === "getstatic" || mn === "getfield" || mn === "putstatic" || mn === "putfield") {
    const [, , desc] = ops[0] as [string, string, string];
    const width = slotWidth(desc);
    return { getstatic: width, getfield: width - 1, putstatic: -width, putfield: -width - 1 }[mn]!;
  }
  throw new Error(`no stack delta for ${mn}`);
}

function computeLimits(method: MethodSpec): { maxStack: number; maxLocals: number } {
  const code = method.code ?? [];
  const { params } = parseDescriptor(method.descriptor);
  const isStatic = ((method.access ?? ACC_PUBLIC | ACC_STATIC) & ACC_STATIC) !== 0;
  let maxLocals = params.reduce((n, p) => n + slotWidth(p), isStatic ? 0 : 1);
  for (const ins of code) {
    const mn = ins[0];
    if (/^[ifa](load|store)$/.test(mn)) maxLocals = Math.max(maxLocals, (ins[1] as number) + 1);
    if (/^[ld](load|store)$/.test(mn)) maxLocals = Math.max(maxLocals, (ins[1] as number) + 2);
    if (mn === "iinc") maxLocals = Math.max(maxLocals, (ins[1] as number) + 1);
  }
  const labelIndex = new Map<string, number>();
  const real: Ins[] = [];
  for (const ins of code) {
    if (ins[0] === "label") labelIndex.set(ins[1] as string, real.length);
    else real.push(ins);
  }
  const depths = new Map<number, number>([[0, 0]]);
  const work = [0];
  let maxStack = 0;
  const terminal = /^(return|[ilfda]return)$/;
  while (work.length > 0) {
    const i = work.pop()!;
    if (i >= real.length) continue;
    const ins = real[i];
    const depth = depths.get(i)!;
    const after = depth + instructionDelta(ins);
    if (after < 0) throw new Error(`stack underflow at instruction ${i} of ${method.name}`);
    maxStack = Math.max(maxStack, depth, after,
      ins[0].startsWith("dup2") || ins[0] === "dup_x2" ? depth + 2 : 0);
    let succs: number[] = [];
    const mn = ins[0];
    if (terminal.test(mn)) succs = [];
    else if (mn === "goto") succs = [labelIndex.get(ins[1] as string)!];
    else if (BRANCHES.has(mn)) succs = [labelIndex.get(ins[1] as string)!, i + 1];
    else if (mn === "tableswitch") {
      succs = [labelIndex.get(ins[1] as string)!,
               ...(ins[3] as string[]).map((t) => labelIndex.get(t)!)];
    } else if (mn === "lookupswitch") {
      succs = [labelIndex.get(ins[1] as string)!,
               ...(ins[2] as Array<[number, string]>).map(([, t]) => labelIndex.get(t)!)];
    } else succs = [i + 1];
    for (const s of succs) {
      const known = depths.get(s);
      if (known === undefined) {
        depths.set(s, after);
        work.push(s);
      } else if (known !== after) {
        throw new Error(`inconsistent stack depth at instruction ${s} of ${method.name}`);
      }
    }
  }
  return { maxStack, maxLocals };
}

function encodeElementValue(pool: ConstantPool, value: ElementValue): ByteWriter {
  const w = new ByteWriter();
  if (typeof value === "string") return w.u1(0x73).u2(pool.utf8(value)); // 's'
  if (typeof value === "boolean") return w.u1(0x5a).u2(pool.integer(value ? 1 : 0)); // 'Z'
  if (typeof value === "number") return w.u1(0x49).u2(pool.integer(value)); // 'I'
  if (Array.isArray(value)) {
    w.u1(0x5b).u2(value.length); // '['
    for (const item of value) w.raw(encodeElementValue(pool, item).bytes());
    return w;
  }
  return w.u1(0x40).raw(encodeAnnotation(pool, value).bytes()); // '@'
}

function encodeAnnotation(pool: ConstantPool, ann: AnnotationSpec): ByteWriter {
  const w = new ByteWriter();
  w.u2(pool.utf8(`L${ann.type.replace(/\./g, "/")};`));
  const elements = Object.entries(ann.elements ?? {});
  w.u2(elements.length);
  for (const [name, value] of elements) {
    w.u2(pool.utf8(name)).raw(encodeElementValue(pool, value).bytes());
  }
  return w;
}

function attribute(pool: ConstantPool, name: string, payload: Uint8Array): ByteWriter {
  const w = new ByteWriter();
  return w.u2(pool.utf8(name)).u4(payload.length).raw(payload);
}

export function writeClass(spec: ClassSpec): Uint8Array {
  const pool = new ConstantPool();
  const methods = [...(spec.methods ?? [])];
  const superName = spec.superName ?? "java.lang.Object";
  if ((spec.defaultInit ?? true) && !methods.some((m) => m.name === "<init>")) {
    methods.push({
      name: "<init>", descriptor: "()V", access: ACC_PUBLIC,
      code: [["aload", 0], ["invokespecial", [superName, "<init>", "()V"]], ["return"]],
    });
  }

  const fieldBlobs = (spec.fields ?? []).map((f) => {
    const w = new ByteWriter();
    return w.u2(f.access ?? ACC_PRIVATE).u2(pool.utf8(f.name))
      .u2(pool.utf8(f.descriptor)).u2(0);
  });

  const methodBlobs = methods.map((m) => {
    const attrs: ByteWriter[] = [];
    if (m.code) {
      const bytecode = assemble(pool, m.code);
      const { maxStack, maxLocals } = computeLimits(m);
      const payload = new ByteWriter();
      payload.u2(maxStack).u2(maxLocals).u4(bytecode.length).raw(bytecode);
      payload.u2(0); // exception table
      payload.u2(0); // code attributes
      attrs.push(attribute(pool, "Code", payload.bytes()));
    }
    if (m.annotations && m.annotations.length > 0) {
      const payload = new ByteWriter();
      payload.u2(m.annotations.length);
      for (const ann of m.annotations) payload.raw(encodeAnnotation(pool, ann).bytes());
      attrs.push(attribute(pool, "RuntimeVisibleAnnotations", payload.bytes()));
    }
    if (m.paramNames) {
      const payload = new ByteWriter();
      payload.u1(m.paramNames.length);
      for (const name of m.paramNames) payload.u2(pool.utf8(name)).u2(0);
      attrs.push(attribute(pool, "MethodParameters", payload.bytes()));
    }
    const w = new ByteWriter();
    w.u2(m.access ?? (ACC_PUBLIC | ACC_STATIC)).u2(pool.utf8(m.name))
      .u2(pool.utf8(m.descriptor)).u2(attrs.length);
    for (const a of attrs) w.raw(a.bytes());
    return w;
  });

  const thisIdx = pool.klass(spec.name);
  const superIdx = pool.klass(superName);
  const ifaceIdxs = (spec.interfaces ?? []).map((i) => pool.klass(i));

  const out = new ByteWriter();
  out.u4(0xcafebabe).u2(0).u2(spec.version ?? 52);
  out.raw(pool.dump().bytes());
  out.u2((spec.access ?? ACC_PUBLIC) | 0x0020); // ACC_SUPER
  out.u2(thisIdx).u2(superIdx);
  out.u2(ifaceIdxs.length);
  for (const idx of ifaceIdxs) out.u2(idx);
  out.u2(fieldBlobs.length);
  for (const f of fieldBlobs) out.raw(f.bytes());
  out.u2(methodBlobs.length);
  for (const m of methodBlobs) out.raw(m.bytes());
  out.u2(0); // class attributes
  return out.bytes();
}

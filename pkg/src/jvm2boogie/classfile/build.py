"""Classfile synthesis from declarative plans.

Plans drive the hermetic fixture corpus: instructions are written in the
same canonical form the parser produces, with string labels in place of
byte offsets.  The assembler chooses encodings (iconst/bipush/ldc,
xload_N/xload/wide) and computes max_stack/max_locals itself.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from . import mutf8
from .model import (
    ACC_SUPER,
    AnnotationValue,
    parse_descriptor,
    slot_width,
)
from .opcodes import MNEMONIC_TO_OPCODE, NEWARRAY_CODES
from ..errors import BuildPlanError


@dataclass
class FieldPlan:
    name: str
    descriptor: str
    access_flags: int = 0x0001  # public


@dataclass
class MethodPlan:
    name: str
    descriptor: str
    access_flags: int = 0x0009  # public static
    code: list[tuple] | None = None
    annotations: list[AnnotationValue] = field(default_factory=list)
    param_names: list[str] | None = None
    exception_table: list[tuple[str, str, str, str | None]] = field(default_factory=list)


@dataclass
class ClassPlan:
    name: str
    super_class: str | None = "java.lang.Object"
    major_version: int = 52
    access_flags: int = 0x0021  # public super
    interfaces: list[str] = field(default_factory=list)
    fields: list[FieldPlan] = field(default_factory=list)
    methods: list[MethodPlan] = field(default_factory=list)
    class_annotations: list[AnnotationValue] = field(default_factory=list)
    default_init: bool = True


CONDITIONAL_BRANCHES = {
    "ifeq", "ifne", "iflt", "ifge", "ifgt", "ifle",
    "if_icmpeq", "if_icmpne", "if_icmplt", "if_icmpge", "if_icmpgt", "if_icmple",
    "if_acmpeq", "if_acmpne", "ifnull", "ifnonnull",
}
BRANCHES = CONDITIONAL_BRANCHES | {"goto"}


class _PoolBuilder:
    def __init__(self):
        self.entries: list[bytes] = []
        self.index: dict[tuple, int] = {}
        self.next = 1

    def _intern(self, key: tuple, payload: bytes, slots: int = 1) -> int:
        if key in self.index:
            return self.index[key]
        idx = self.next
        self.index[key] = idx
        self.entries.append(payload)
        self.next += slots
        return idx

    def utf8(self, text: str) -> int:
        data = mutf8.encode(text)
        return self._intern(("utf8", text), struct.pack(">BH", 1, len(data)) + data)

    def klass(self, dotted: str) -> int:
        internal = dotted if dotted.startswith("[") else dotted.replace(".", "/")
        name_idx = self.utf8(internal)
        return self._intern(("class", internal), struct.pack(">BH", 7, name_idx))

    def integer(self, value: int) -> int:
        return self._intern(("int", value), struct.pack(">Bi", 3, value))

    def long(self, value: int) -> int:
        return self._intern(("long", value), struct.pack(">Bq", 5, value), slots=2)

    def float(self, value: float) -> int:
        raw = struct.pack(">f", value)
        return self._intern(("float", raw), b"\x04" + raw)

    def double(self, value: float) -> int:
        raw = struct.pack(">d", value)
        return self._intern(("double", raw), b"\x06" + raw, slots=2)

    def string(self, text: str) -> int:
        utf_idx = self.utf8(text)
        return self._intern(("string", text), struct.pack(">BH", 8, utf_idx))

    def name_and_type(self, name: str, desc: str) -> int:
        n, d = self.utf8(name), self.utf8(desc)
        return self._intern(("nat", name, desc), struct.pack(">BHH", 12, n, d))

    def member(self, tag: int, owner: str, name: str, desc: str) -> int:
        c = self.klass(owner)
        nat = self.name_and_type(name, desc)
        return self._intern(("member", tag, owner, name, desc), struct.pack(">BHH", tag, c, nat))

    def dump(self) -> bytes:
        return struct.pack(">H", self.next) + b"".join(self.entries)


def build_class(plan: ClassPlan) -> bytes:
    pool = _PoolBuilder()
    methods = list(plan.methods)
    if plan.default_init and not any(m.name == "<init>" for m in methods):
        super_name = plan.super_class or "java.lang.Object"
        methods.append(MethodPlan(
            name="<init>", descriptor="()V", access_flags=0x0001,
            code=[("aload", 0), ("invokespecial", (super_name, "<init>", "()V")), ("return",)],
        ))

    field_blobs = [_build_field(pool, f) for f in plan.fields]
    method_blobs = [_build_method(pool, plan, m) for m in methods]
    class_attrs = []
    if plan.class_annotations:
        class_attrs.append(_annotations_attribute(pool, plan.class_annotations))

    this_idx = pool.klass(plan.name)
    super_idx = pool.klass(plan.super_class) if plan.super_class else 0
    iface_idxs = [pool.klass(i) for i in plan.interfaces]

    out = bytearray()
    out += struct.pack(">IHH", 0xCAFEBABE, 0, plan.major_version)
    out += pool.dump()
    out += struct.pack(">HHH", plan.access_flags | ACC_SUPER, this_idx, super_idx)
    out += struct.pack(">H", len(iface_idxs))
    for idx in iface_idxs:
        out += struct.pack(">H", idx)
    out += struct.pack(">H", len(field_blobs)) + b"".join(field_blobs)
    out += struct.pack(">H", len(method_blobs)) + b"".join(method_blobs)
    out += struct.pack(">H", len(class_attrs)) + b"".join(class_attrs)
    return bytes(out)


def _build_field(pool: _PoolBuilder, f: FieldPlan) -> bytes:
    out = struct.pack(">HHH", f.access_flags, pool.utf8(f.name), pool.utf8(f.descriptor))
    return out + struct.pack(">H", 0)


def _build_method(pool: _PoolBuilder, plan: ClassPlan, m: MethodPlan) -> bytes:
    attrs: list[bytes] = []
    if m.code is not None:
        attrs.append(_code_attribute(pool, m))
    if m.annotations:
        attrs.append(_annotations_attribute(pool, m.annotations))
    if m.param_names is not None:
        payload = bytearray(struct.pack(">B", len(m.param_names)))
        for name in m.param_names:
            payload += struct.pack(">HH", pool.utf8(name) if name else 0, 0)
        attrs.append(_attribute(pool, "MethodParameters", bytes(payload)))
    out = struct.pack(">HHH", m.access_flags, pool.utf8(m.name), pool.utf8(m.descriptor))
    return out + struct.pack(">H", len(attrs)) + b"".join(attrs)


def _attribute(pool: _PoolBuilder, name: str, payload: bytes) -> bytes:
    return struct.pack(">HI", pool.utf8(name), len(payload)) + payload


def _annotations_attribute(pool: _PoolBuilder, annotations: list[AnnotationValue]) -> bytes:
    payload = bytearray(struct.pack(">H", len(annotations)))
    for ann in annotations:
        payload += _encode_annotation(pool, ann)
    return _attribute(pool, "RuntimeVisibleAnnotations", bytes(payload))


def _encode_annotation(pool: _PoolBuilder, ann: AnnotationValue) -> bytes:
    desc = "L%s;" % ann.type_name.replace(".", "/")
    out = bytearray(struct.pack(">HH", pool.utf8(desc), len(ann.elements)))
    for name, value in ann.elements:
        out += struct.pack(">H", pool.utf8(name))
        out += _encode_element_value(pool, value)
    return bytes(out)


def _encode_element_value(pool: _PoolBuilder, value) -> bytes:
    if isinstance(value, AnnotationValue):
        return b"@" + _encode_annotation(pool, value)
    if isinstance(value, bool):
        return struct.pack(">cH", b"Z", pool.integer(1 if value else 0))
    if isinstance(value, int):
        return struct.pack(">cH", b"I", pool.integer(value))
    if isinstance(value, float):
        return struct.pack(">cH", b"D", pool.double(value))
    if isinstance(value, str):
        return struct.pack(">cH", b"s", pool.utf8(value))
    if isinstance(value, (tuple, list)):
        out = bytearray(struct.pack(">cH", b"[", len(value)))
        for item in value:
            out += _encode_element_value(pool, item)
        return bytes(out)
    raise BuildPlanError("E_PLAN_INCONSISTENT", "unsupported annotation value %r" % (value,))


def _code_attribute(pool: _PoolBuilder, m: MethodPlan) -> bytes:
    code = m.code or []
    bytecode, label_offsets = _assemble(pool, code, m)
    max_stack, max_locals = _compute_limits(code, m)
    payload = bytearray(struct.pack(">HHI", max_stack, max_locals, len(bytecode)))
    payload += bytecode
    payload += struct.pack(">H", len(m.exception_table))
    for start, end, handler, catch in m.exception_table:
        for label in (start, end, handler):
            if label not in label_offsets:
                raise BuildPlanError("E_PLAN_INCONSISTENT",
                                     "exception table label %r undefined" % label)
        catch_idx = pool.klass(catch) if catch else 0
        payload += struct.pack(">HHHH", label_offsets[start], label_offsets[end],
                               label_offsets[handler], catch_idx)
    payload += struct.pack(">H", 0)
    return _attribute(pool, "Code", bytes(payload))


def _assemble(pool: _PoolBuilder, code: list[tuple], m: MethodPlan) -> tuple[bytes, dict[str, int]]:
    labels = {}
    for ins in code:
        if ins[0] == "label":
            if ins[1] in labels:
                raise BuildPlanError("E_PLAN_INCONSISTENT", "duplicate label %r" % ins[1])
            labels[ins[1]] = -1
    for ins in code:
        if ins[0] in BRANCHES and ins[1] not in labels:
            raise BuildPlanError("E_PLAN_INCONSISTENT",
                                 "branch to undefined label %r in %s" % (ins[1], m.name))
        if ins[0] == "tableswitch":
            for lbl in [ins[1]] + list(ins[3]):
                if lbl not in labels:
                    raise BuildPlanError("E_PLAN_INCONSISTENT", "switch label %r undefined" % lbl)
        if ins[0] == "lookupswitch":
            for lbl in [ins[1]] + [t for _, t in ins[2]]:
                if lbl not in labels:
                    raise BuildPlanError("E_PLAN_INCONSISTENT", "switch label %r undefined" % lbl)

    # iterate layout until offsets stabilize (switch padding depends on position)
    offsets = {name: 0 for name in labels}
    encoded = b""
    for _ in range(10):
        out = bytearray()
        new_offsets = {}
        for ins in code:
            if ins[0] == "label":
                new_offsets[ins[1]] = len(out)
            else:
                out += _encode_instruction(pool, ins, len(out), offsets)
        encoded = bytes(out)
        if new_offsets == offsets:
            break
        offsets = new_offsets
    else:
        raise BuildPlanError("E_PLAN_INCONSISTENT", "code layout did not stabilize")
    if len(encoded) > 0xFFFF:
        raise BuildPlanError("E_PLAN_INCONSISTENT", "method body exceeds 65535 bytes")
    return encoded, offsets


def _op(mnemonic: str) -> int:
    return MNEMONIC_TO_OPCODE[mnemonic]


def _encode_instruction(pool, ins: tuple, offset: int, labels: dict[str, int]) -> bytes:
    mn = ins[0]
    if mn == "push":
        return _encode_push(pool, ins[1], ins[2])
    if mn in ("iload", "lload", "fload", "dload", "aload",
              "istore", "lstore", "fstore", "dstore", "astore"):
        idx = ins[1]
        if idx <= 3:
            return struct.pack(">B", _op("%s_%d" % (mn, idx)))
        if idx <= 255:
            return struct.pack(">BB", _op(mn), idx)
        return struct.pack(">BBH", _op("wide"), _op(mn), idx)
    if mn == "iinc":
        idx, const = ins[1], ins[2]
        if idx <= 255 and -128 <= const <= 127:
            return struct.pack(">BBb", _op("iinc"), idx, const)
        return struct.pack(">BBHh", _op("wide"), _op("iinc"), idx, const)
    if mn in BRANCHES:
        delta = labels[ins[1]] - offset
        if not (-0x8000 <= delta <= 0x7FFF):
            raise BuildPlanError("E_PLAN_INCONSISTENT", "branch offset too far")
        return struct.pack(">Bh", _op(mn), delta)
    if mn in ("getstatic", "putstatic", "getfield", "putfield"):
        owner, name, desc = ins[1]
        return struct.pack(">BH", _op(mn), pool.member(9, owner, name, desc))
    if mn in ("invokevirtual", "invokespecial", "invokestatic"):
        owner, name, desc = ins[1]
        return struct.pack(">BH", _op(mn), pool.member(10, owner, name, desc))
    if mn == "invokeinterface":
        owner, name, desc = ins[1]
        params, _ = parse_descriptor(desc)
        count = 1 + sum(slot_width(p) for p in params)
        return struct.pack(">BHBB", _op(mn), pool.member(11, owner, name, desc), count, 0)
    if mn == "invokedynamic":
        return struct.pack(">BHH", _op(mn), 0, 0)
    if mn in ("new", "anewarray", "checkcast", "instanceof"):
        return struct.pack(">BH", _op(mn), pool.klass(ins[1]))
    if mn == "newarray":
        return struct.pack(">BB", _op(mn), NEWARRAY_CODES[ins[1]])
    if mn == "multianewarray":
        return struct.pack(">BHB", _op(mn), pool.klass(ins[1]), ins[2])
    if mn == "tableswitch":
        default, low, targets = ins[1], ins[2], ins[3]
        out = bytearray(struct.pack(">B", _op(mn)))
        while (offset + len(out)) % 4 != 0:
            out.append(0)
        out += struct.pack(">iii", labels[default] - offset, low, low + len(targets) - 1)
        for t in targets:
            out += struct.pack(">i", labels[t] - offset)
        return bytes(out)
    if mn == "lookupswitch":
        default, pairs = ins[1], ins[2]
        out = bytearray(struct.pack(">B", _op(mn)))
        while (offset + len(out)) % 4 != 0:
            out.append(0)
        out += struct.pack(">ii", labels[default] - offset, len(pairs))
        for match, target in sorted(pairs):
            out += struct.pack(">ii", match, labels[target] - offset)
        return bytes(out)
    if mn in MNEMONIC_TO_OPCODE:
        return struct.pack(">B", _op(mn))
    raise BuildPlanError("E_PLAN_INCONSISTENT", "unknown instruction %r" % (ins,))


def _encode_push(pool, kind: str, value) -> bytes:
    if kind == "null":
        return struct.pack(">B", _op("aconst_null"))
    if kind == "int":
        if -1 <= value <= 5:
            return struct.pack(">B", _op("iconst_0") + value)
        if -128 <= value <= 127:
            return struct.pack(">Bb", _op("bipush"), value)
        if -0x8000 <= value <= 0x7FFF:
            return struct.pack(">Bh", _op("sipush"), value)
        return _ldc(pool.integer(value))
    if kind == "long":
        if value in (0, 1):
            return struct.pack(">B", _op("lconst_0") + value)
        return struct.pack(">BH", _op("ldc2_w"), pool.long(value))
    if kind == "float":
        if value in (0.0, 1.0, 2.0) and str(value)[0] != "-":
            return struct.pack(">B", _op("fconst_0") + int(value))
        return _ldc(pool.float(value))
    if kind == "double":
        if value in (0.0, 1.0) and str(value)[0] != "-":
            return struct.pack(">B", _op("dconst_0") + int(value))
        return struct.pack(">BH", _op("ldc2_w"), pool.double(value))
    if kind == "string":
        return _ldc(pool.string(value))
    if kind == "class":
        return _ldc(pool.klass(value))
    raise BuildPlanError("E_PLAN_INCONSISTENT", "unknown push kind %r" % kind)


def _ldc(index: int) -> bytes:
    if index <= 255:
        return struct.pack(">BB", _op("ldc"), index)
    return struct.pack(">BH", _op("ldc_w"), index)


# -- stack-depth computation --------------------------------------------------

_FIXED_DELTAS = {
    "nop": 0, "arraylength": 0, "swap": 0,
    "iaload": -1, "faload": -1, "aaload": -1, "baload": -1, "caload": -1, "saload": -1,
    "laload": 0, "daload": 0,
    "iastore": -3, "fastore": -3, "aastore": -3, "bastore": -3, "castore": -3, "sastore": -3,
    "lastore": -4, "dastore": -4,
    "pop": -1, "pop2": -2, "dup": 1, "dup_x1": 1, "dup_x2": 1,
    "dup2": 2, "dup2_x1": 2, "dup2_x2": 2,
    "iadd": -1, "isub": -1, "imul": -1, "idiv": -1, "irem": -1,
    "fadd": -1, "fsub": -1, "fmul": -1, "fdiv": -1, "frem": -1,
    "ladd": -2, "lsub": -2, "lmul": -2, "ldiv": -2, "lrem": -2,
    "dadd": -2, "dsub": -2, "dmul": -2, "ddiv": -2, "drem": -2,
    "ineg": 0, "lneg": 0, "fneg": 0, "dneg": 0,
    "ishl": -1, "ishr": -1, "iushr": -1, "lshl": -1, "lshr": -1, "lushr": -1,
    "iand": -1, "ior": -1, "ixor": -1, "land": -2, "lor": -2, "lxor": -2,
    "iinc": 0,
    "i2l": 1, "i2f": 0, "i2d": 1, "l2i": -1, "l2f": -1, "l2d": 0,
    "f2i": 0, "f2l": 1, "f2d": 1, "d2i": -1, "d2l": 0, "d2f": -1,
    "i2b": 0, "i2c": 0, "i2s": 0,
    "lcmp": -3, "fcmpl": -1, "fcmpg": -1, "dcmpl": -3, "dcmpg": -3,
    "new": 1, "newarray": 0, "anewarray": 0,
    "checkcast": 0, "instanceof": 0, "athrow": 0,
    "monitorenter": -1, "monitorexit": -1,
}

_WIDE_PUSH = {"long", "double"}


def _instruction_delta(ins: tuple) -> int:
    mn = ins[0]
    if mn == "push":
        return 2 if ins[1] in _WIDE_PUSH else 1
    if mn in ("iload", "fload", "aload"):
        return 1
    if mn in ("lload", "dload"):
        return 2
    if mn in ("istore", "fstore", "astore"):
        return -1
    if mn in ("lstore", "dstore"):
        return -2
    if mn in CONDITIONAL_BRANCHES:
        return -2 if mn.startswith("if_icmp") or mn.startswith("if_acmp") else -1
    if mn in ("goto", "return"):
        return 0
    if mn in ("ireturn", "freturn", "areturn", "tableswitch", "lookupswitch"):
        return -1
    if mn in ("lreturn", "dreturn"):
        return -2
    if mn in ("getstatic", "getfield", "putstatic", "putfield"):
        owner, name, desc = ins[1]
        width = slot_width(desc)
        base = {"getstatic": width, "getfield": width - 1,
                "putstatic": -width, "putfield": -width - 1}
        return base[mn]
    if mn in ("invokevirtual", "invokespecial", "invokestatic", "invokeinterface"):
        owner, name, desc = ins[1]
        params, ret = parse_descriptor(desc)
        pops = sum(slot_width(p) for p in params)
        if mn != "invokestatic":
            pops += 1
        pushes = 0 if ret == "V" else slot_width(ret)
        return pushes - pops
    if mn == "invokedynamic":
        return 0
    if mn == "multianewarray":
        return 1 - ins[2]
    if mn in _FIXED_DELTAS:
        return _FIXED_DELTAS[mn]
    raise BuildPlanError("E_PLAN_INCONSISTENT", "unknown instruction %r" % (ins,))


def _compute_limits(code: list[tuple], m: MethodPlan) -> tuple[int, int]:
    params, _ = parse_descriptor(m.descriptor)
    locals_base = sum(slot_width(p) for p in params)
    if not (m.access_flags & 0x0008):
        locals_base += 1
    max_locals = locals_base
    for ins in code:
        if ins[0] in ("iload", "fload", "aload", "istore", "fstore", "astore"):
            max_locals = max(max_locals, ins[1] + 1)
        elif ins[0] in ("lload", "dload", "lstore", "dstore"):
            max_locals = max(max_locals, ins[1] + 2)
        elif ins[0] == "iinc":
            max_locals = max(max_locals, ins[1] + 1)

    # map labels to instruction indices, then propagate depths
    label_index = {}
    real = []  # (instruction, code index)
    for ins in code:
        if ins[0] == "label":
            label_index[ins[1]] = len(real)
        else:
            real.append(ins)
    depths: dict[int, int] = {0: 0}
    work = [0]
    max_depth = 0
    terminal = {"return", "ireturn", "lreturn", "freturn", "dreturn", "areturn", "athrow"}
    while work:
        i = work.pop()
        if i >= len(real):
            continue
        depth = depths[i]
        ins = real[i]
        after = depth + _instruction_delta(ins)
        if after < 0:
            raise BuildPlanError("E_PLAN_INCONSISTENT",
                                 "stack underflow at instruction %d of %s" % (i, m.name))
        peak = max(depth, after)
        if ins[0] == "dup_x2" or ins[0] == "dup2" or ins[0] == "dup2_x1" or ins[0] == "dup2_x2":
            peak = max(peak, depth + 2)
        max_depth = max(max_depth, peak)
        succs: list[int] = []
        mn = ins[0]
        if mn in terminal:
            succs = []
        elif mn == "goto":
            succs = [label_index[ins[1]]]
        elif mn in CONDITIONAL_BRANCHES:
            succs = [label_index[ins[1]], i + 1]
        elif mn == "tableswitch":
            succs = [label_index[ins[1]]] + [label_index[t] for t in ins[3]]
        elif mn == "lookupswitch":
            succs = [label_index[ins[1]]] + [label_index[t] for _, t in ins[2]]
        else:
            succs = [i + 1]
        for s in succs:
            if s in depths:
                if depths[s] != after:
                    raise BuildPlanError(
                        "E_PLAN_INCONSISTENT",
                        "inconsistent stack depth at instruction %d of %s" % (s, m.name))
            else:
                depths[s] = after
                work.append(s)
    return max_depth, max_locals


# -- structural comparison helpers --------------------------------------------

def plan_code_shape(code: list[tuple]) -> list[tuple]:
    """Plan instructions with labels resolved to instruction indices."""
    label_index = {}
    real = []
    for ins in code:
        if ins[0] == "label":
            label_index[ins[1]] = len(real)
        else:
            real.append(ins)
    return [_shape(ins, lambda lbl: label_index[lbl]) for ins in real]


def parsed_code_shape(instructions) -> list[tuple]:
    """Parsed instructions with branch offsets resolved to instruction indices."""
    offset_index = {ins.offset: i for i, ins in enumerate(instructions)}
    return [_shape((ins.mnemonic,) + ins.operands, lambda off: offset_index[off])
            for ins in instructions]


def _shape(ins: tuple, target) -> tuple:
    mn = ins[0]
    if mn in BRANCHES:
        return (mn, target(ins[1]))
    if mn == "tableswitch":
        return (mn, target(ins[1]), ins[2], tuple(target(t) for t in ins[3]))
    if mn == "lookupswitch":
        pairs = ins[2] if isinstance(ins[2], tuple) else tuple(ins[2])
        return (mn, target(ins[1]), tuple(sorted((k, target(t)) for k, t in pairs)))
    if mn == "push" and ins[1] == "float":
        return (mn, "float", struct.pack(">f", ins[2]))
    if mn == "push" and ins[1] == "double":
        return (mn, "double", struct.pack(">d", ins[2]))
    if mn in ("getstatic", "putstatic", "getfield", "putfield",
              "invokevirtual", "invokespecial", "invokestatic", "invokeinterface"):
        return (mn, tuple(ins[1]))
    return tuple(ins)

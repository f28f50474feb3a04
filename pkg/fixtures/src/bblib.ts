/**
 * The contract annotation library as synthesized classfiles.
 *
 * Operator bodies are branch-free on purpose: comparisons go through
 * cmp-style instructions plus sign-bit arithmetic, so every operator method
 * body is itself a pure straight-line (aggregable) snippet.  The translator
 * recognizes calls to these methods by owner/name/descriptor and rewrites
 * them to logic operators, so the bodies only matter for corpus completeness.
 */

import {
  ACC_ABSTRACT,
  ACC_ANNOTATION,
  ACC_INTERFACE,
  ACC_PUBLIC,
  ClassSpec,
  Ins,
  MethodSpec,
} from "./classfile";

export const NAMESPACE = "byteback.annotations";
export const OPERATORS = `${NAMESPACE}.Operators`;
export const BINDING = `${NAMESPACE}.Binding`;
export const REQUIRE = `${NAMESPACE}.Require`;
export const ENSURE = `${NAMESPACE}.Ensure`;
export const PREDICATE = `${NAMESPACE}.Predicate`;
export const PURE = `${NAMESPACE}.Pure`;
const OBJ = "Ljava/lang/Object;";

function annotationInterface(name: string, withValue: boolean, arrayOfAnnotations?: string): ClassSpec {
  const methods: MethodSpec[] = [];
  if (withValue) {
    const desc = arrayOfAnnotations
      ? `()[L${arrayOfAnnotations.replace(/\./g, "/")};`
      : "()Ljava/lang/String;";
    methods.push({
      name: "value",
      descriptor: desc,
      access: ACC_PUBLIC | ACC_ABSTRACT,
    });
  }
  return {
    name,
    superName: "java.lang.Object",
    access: ACC_PUBLIC | ACC_INTERFACE | ACC_ABSTRACT | ACC_ANNOTATION,
    interfaces: ["java.lang.annotation.Annotation"],
    methods,
    defaultInit: false,
  };
}

/** push sign bit of the int on top of the stack (0 or 1) */
const SIGN_BIT: Ins[] = [["push", "int", 31], ["iushr"]];

/** load two values of the given descriptor and leave a -1/0/1 comparison
 * result; floats/doubles pick the NaN bias javac itself uses */
function cmpFor(type: string, biasPositive: boolean): Ins[] {
  switch (type) {
    case "I":
      return [["iload", 0], ["i2l"], ["iload", 1], ["i2l"], ["lcmp"]];
    case "J":
      return [["lload", 0], ["lload", 2], ["lcmp"]];
    case "F":
      return [["fload", 0], ["fload", 1], [biasPositive ? "fcmpg" : "fcmpl"]];
    case "D":
      return [["dload", 0], ["dload", 2], [biasPositive ? "dcmpg" : "dcmpl"]];
    default:
      throw new Error(type);
  }
}

function comparison(name: string, type: string): MethodSpec {
  let code: Ins[];
  switch (name) {
    case "lt":
      code = [...cmpFor(type, true), ...SIGN_BIT];
      break;
    case "gte": // !(a < b)
      code = [...cmpFor(type, true), ...SIGN_BIT, ["push", "int", 1], ["ixor"]];
      break;
    case "gt": // sign(-c)
      code = [...cmpFor(type, false), ["ineg"], ...SIGN_BIT];
      break;
    case "lte": // !(a > b)
      code = [...cmpFor(type, false), ["ineg"], ...SIGN_BIT, ["push", "int", 1], ["ixor"]];
      break;
    case "neq": // sign(c | -c)
      code = [...cmpFor(type, true), ["dup"], ["ineg"], ["ior"], ...SIGN_BIT];
      break;
    case "eq":
      code = [...cmpFor(type, true), ["dup"], ["ineg"], ["ior"], ...SIGN_BIT,
              ["push", "int", 1], ["ixor"]];
      break;
    default:
      throw new Error(name);
  }
  code.push(["ireturn"]);
  return { name, descriptor: `(${type}${type})Z`, code };
}

function conditional(type: string): MethodSpec {
  const second = 1 + (type === "J" || type === "D" ? 2 : 1);
  let code: Ins[];
  if (type === "I") {
    // c*t + (1-c)*e
    code = [
      ["iload", 0], ["iload", 1], ["imul"],
      ["push", "int", 1], ["iload", 0], ["isub"], ["iload", 2], ["imul"],
      ["iadd"], ["ireturn"],
    ];
  } else if (type === "Z") {
    // c&t | !c&e
    code = [
      ["iload", 0], ["iload", 1], ["iand"],
      ["iload", 0], ["push", "int", 1], ["ixor"], ["iload", 2], ["iand"],
      ["ior"], ["ireturn"],
    ];
  } else if (type === "J") {
    code = [
      ["iload", 0], ["i2l"], ["lload", 1], ["lmul"],
      ["push", "int", 1], ["iload", 0], ["isub"], ["i2l"], ["lload", 3], ["lmul"],
      ["ladd"], ["lreturn"],
    ];
  } else if (type === "F") {
    // recognized as an intrinsic before the body matters
    code = [["fload", 1], ["freturn"]];
  } else if (type === "D") {
    code = [["dload", 1], ["dreturn"]];
  } else {
    code = [["aload", 1], ["areturn"]];
  }
  return { name: "conditional", descriptor: `(Z${type}${type})${type}`, code };
}

function quantifier(name: string, type: string): MethodSpec {
  const bodySlot = type === "J" || type === "D" ? 2 : 1;
  return {
    name,
    descriptor: `(${type}Z)Z`,
    code: [["iload", bodySlot], ["ireturn"]],
  };
}

function identity(name: string, type: string): MethodSpec {
  const loads: Record<string, [string, string]> = {
    I: ["iload", "ireturn"], J: ["lload", "lreturn"], F: ["fload", "freturn"],
    D: ["dload", "dreturn"], Z: ["iload", "ireturn"],
  };
  const [load, ret] = loads[type] ?? ["aload", "areturn"];
  return { name, descriptor: `(${type})${type}`, code: [[load, 0], [ret]] };
}

export function operatorsClass(): ClassSpec {
  const methods: MethodSpec[] = [];
  for (const name of ["eq", "neq", "lt", "lte", "gt", "gte"]) {
    for (const type of ["I", "J", "F", "D"]) {
      methods.push(comparison(name, type));
    }
  }
  // eq/neq on booleans and opaque references
  methods.push({ name: "eq", descriptor: "(ZZ)Z",
                 code: [["iload", 0], ["iload", 1], ["ixor"],
                        ["push", "int", 1], ["ixor"], ["ireturn"]] });
  methods.push({ name: "neq", descriptor: "(ZZ)Z",
                 code: [["iload", 0], ["iload", 1], ["ixor"], ["ireturn"]] });
  methods.push({ name: "eq", descriptor: `(${OBJ}${OBJ})Z`,
                 code: [["push", "int", 0], ["ireturn"]] });
  methods.push({ name: "neq", descriptor: `(${OBJ}${OBJ})Z`,
                 code: [["push", "int", 0], ["ireturn"]] });
  methods.push({ name: "not", descriptor: "(Z)Z",
                 code: [["iload", 0], ["push", "int", 1], ["ixor"], ["ireturn"]] });
  methods.push({ name: "implies", descriptor: "(ZZ)Z",
                 code: [["iload", 0], ["push", "int", 1], ["ixor"],
                        ["iload", 1], ["ior"], ["ireturn"]] });
  for (const type of ["I", "J", "F", "D", "Z", OBJ]) {
    methods.push(conditional(type));
    methods.push(quantifier("forall", type));
    methods.push(quantifier("exists", type));
    methods.push(identity("old", type));
  }
  for (const name of ["invariant", "assertion", "assumption"]) {
    methods.push({ name, descriptor: "(Z)V", code: [["return"]] });
  }
  return { name: OPERATORS, methods, defaultInit: false };
}

export function bindingClass(): ClassSpec {
  const factories: Array<[string, string, Ins[]]> = [
    ["integer", "I", [["push", "int", 0], ["ireturn"]]],
    ["shortInteger", "S", [["push", "int", 0], ["ireturn"]]],
    ["byteValue", "B", [["push", "int", 0], ["ireturn"]]],
    ["character", "C", [["push", "int", 0], ["ireturn"]]],
    ["booleanValue", "Z", [["push", "int", 0], ["ireturn"]]],
    ["longInteger", "J", [["push", "int", 0], ["i2l"], ["lreturn"]]],
    ["floatValue", "F", [["push", "int", 0], ["i2f"], ["freturn"]]],
    ["doubleValue", "D", [["push", "int", 0], ["i2d"], ["dreturn"]]],
    ["reference", OBJ, [["push", "null", null], ["areturn"]]],
  ];
  return {
    name: BINDING,
    methods: factories.map(([name, type, code]) => ({
      name, descriptor: `()${type}`, code,
    })),
    defaultInit: false,
  };
}

export function libraryClasses(): ClassSpec[] {
  return [
    annotationInterface(REQUIRE, true),
    annotationInterface(ENSURE, true),
    annotationInterface(PREDICATE, false),
    annotationInterface(PURE, false),
    annotationInterface(`${REQUIRE}$Container`, true, REQUIRE),
    annotationInterface(`${ENSURE}$Container`, true, ENSURE),
    operatorsClass(),
    bindingClass(),
  ];
}

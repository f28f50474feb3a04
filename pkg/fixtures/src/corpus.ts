/**
 * Contract-annotated corpus programs, written the way the two compiler
 * generations lower them: test-at-top loops with a single backjump,
 * lookupswitch for switch expressions, a synthetic index for enhanced-for,
 * the varargs flag on variadic signatures.
 *
 * Summary1 targets classfile version 52 (source level 8); Summary2 encodes
 * the same behavior with the newer-source shapes at version 61 (level 17).
 */

import { ACC_PRIVATE, ACC_PUBLIC, ACC_STATIC, ACC_VARARGS, AnnotationSpec, ClassSpec, Ins, MethodSpec } from "./classfile";
import { BINDING, ENSURE, OPERATORS, PREDICATE, PURE, REQUIRE } from "./bblib";

const requires = (p: string): AnnotationSpec => ({ type: REQUIRE, elements: { value: p } });
const ensure = (q: string): AnnotationSpec => ({ type: ENSURE, elements: { value: q } });
const ensureAll = (...qs: string[]): AnnotationSpec => ({
  type: `${ENSURE}$Container`,
  elements: { value: qs.map(ensure) },
});
const PRED: AnnotationSpec = { type: PREDICATE };
const PUREANN: AnnotationSpec = { type: PURE };

const op = (name: string, desc: string): Ins => ["invokestatic", [OPERATORS, name, desc]];
const invariant: Ins[] = [op("invariant", "(Z)V")];

/** contains/no_ones/nonnegative, shared by both summary variants */
function summaryPredicates(owner: string): MethodSpec[] {
  return [
    {
      name: "no_ones", descriptor: "([I)Z", annotations: [PRED],
      paramNames: ["values"],
      code: [
        ["aload", 0], ["push", "int", 1], ["push", "int", 0],
        ["aload", 0], ["arraylength"],
        ["invokestatic", [owner, "contains", "([IIII)Z"]],
        op("not", "(Z)Z"),
        ["ireturn"],
      ],
    },
    {
      name: "nonnegative", descriptor: "([II)Z", annotations: [PRED],
      paramNames: ["values", "result"],
      code: [
        ["iload", 1], ["push", "int", 0],
        op("gte", "(II)Z"),
        ["ireturn"],
      ],
    },
    {
      name: "contains", descriptor: "([IIII)Z", annotations: [PUREANN],
      paramNames: ["as", "e", "from", "to"],
      code: [
        ["invokestatic", [BINDING, "integer", "()I"]], ["istore", 4],
        ["iload", 4],
        ["iload", 2], ["iload", 4], op("lte", "(II)Z"),
        ["iload", 4], ["iload", 3], op("lt", "(II)Z"),
        ["iand"],
        ["aload", 0], ["iload", 4], ["iaload"], ["iload", 1], op("eq", "(II)Z"),
        ["iand"],
        op("exists", "(IZ)Z"),
        ["ireturn"],
      ],
    },
  ];
}

export function summary1Class(): ClassSpec {
  // plain for loop with if/else chains, index local declared explicitly
  const summary1: MethodSpec = {
    name: "summary1", descriptor: "([I)I",
    annotations: [requires("no_ones"), ensure("nonnegative")],
    paramNames: ["values"],
    code: [
      ["push", "int", 0], ["istore", 1],          // result = 0
      ["push", "int", 0], ["istore", 2],          // i = 0
      ["label", "head"],
      ["iload", 2], ["aload", 0], ["arraylength"], ["if_icmpge", "exit"],
      ["aload", 0], ["iload", 2], ["iaload"], ["istore", 3],  // v = values[i]
      ["iload", 1], ["push", "int", 0], op("gte", "(II)Z"), ...invariant,
      ["iload", 3], ["iflt", "continue"],
      ["iload", 3], ["ifne", "notzero"],
      ["iinc", 1, 1], ["goto", "continue"],
      ["label", "notzero"],
      ["iload", 3], ["push", "int", 1], ["if_icmpne", "big"],
      ["iinc", 1, -1], ["goto", "continue"],
      ["label", "big"],
      ["iload", 1], ["iload", 3], ["iadd"], ["istore", 1],
      ["label", "continue"],
      ["iinc", 2, 1], ["goto", "head"],
      ["label", "exit"],
      ["iload", 1], ["ireturn"],
    ],
  };
  return {
    name: "corpus.Summary1",
    version: 52,
    methods: [summary1, ...summaryPredicates("corpus.Summary1")],
  };
}

export function summary2Class(): ClassSpec {
  // varargs + enhanced for (synthetic array/length/index locals) + switch
  // expression with yield (lookupswitch feeding one merged stack value)
  const summary2: MethodSpec = {
    name: "summary2", descriptor: "([I)I",
    access: ACC_PUBLIC | ACC_STATIC | ACC_VARARGS,
    annotations: [requires("no_ones"), ensure("nonnegative")],
    paramNames: ["values"],
    code: [
      ["push", "int", 0], ["istore", 1],            // var result = 0
      ["aload", 0], ["astore", 2],                  // foreach: arr = values
      ["aload", 2], ["arraylength"], ["istore", 3], //          len = arr.length
      ["push", "int", 0], ["istore", 4],            //          idx = 0
      ["label", "head"],
      ["iload", 4], ["iload", 3], ["if_icmpge", "exit"],
      ["aload", 2], ["iload", 4], ["iaload"], ["istore", 5],  // var v = arr[idx]
      ["iload", 1], ["push", "int", 0], op("gte", "(II)Z"), ...invariant,
      ["iload", 1],
      ["iload", 5],
      ["lookupswitch", "default", [[0, "case0"], [1, "case1"]]],
      ["label", "case0"],
      ["push", "int", 1], ["goto", "merge"],        // case 0 -> 1
      ["label", "case1"],
      ["push", "int", -1], ["goto", "merge"],       // case 1 -> yield -1
      ["label", "default"],
      ["iload", 5], ["ifge", "keep"],               // default -> v < 0 ? 0 : v
      ["push", "int", 0], ["goto", "merge"],
      ["label", "keep"],
      ["iload", 5],
      ["label", "merge"],
      ["iadd"], ["istore", 1],                      // result += <switch value>
      ["iinc", 4, 1], ["goto", "head"],
      ["label", "exit"],
      ["iload", 1], ["ireturn"],
    ],
  };
  return {
    name: "corpus.Summary2",
    version: 61,
    methods: [summary2, ...summaryPredicates("corpus.Summary2")],
  };
}

export function gcdClass(): ClassSpec {
  const owner = "corpus.Gcd";
  const gcd: MethodSpec = {
    name: "gcd", descriptor: "(II)I",
    annotations: [requires("positive"), ensureAll("result_positive", "result_divides")],
    paramNames: ["a", "b"],
    code: [
      ["label", "head"],
      ["iload", 1], ["ifeq", "exit"],
      ["iload", 0], ["push", "int", 0], op("gt", "(II)Z"),
      ["iload", 1], ["push", "int", 0], op("gte", "(II)Z"),
      ["iand"], ...invariant,
      ["iload", 1], ["istore", 2],                  // t = b
      ["iload", 0], ["iload", 1], ["irem"], ["istore", 1],  // b = a % b
      ["iload", 2], ["istore", 0],                  // a = t
      ["goto", "head"],
      ["label", "exit"],
      ["iload", 0], ["ireturn"],
    ],
  };
  const positive: MethodSpec = {
    name: "positive", descriptor: "(II)Z", annotations: [PRED],
    paramNames: ["a", "b"],
    code: [
      ["iload", 0], ["push", "int", 0], op("gt", "(II)Z"),
      ["iload", 1], ["push", "int", 0], op("gt", "(II)Z"),
      ["iand"], ["ireturn"],
    ],
  };
  const resultPositive: MethodSpec = {
    name: "result_positive", descriptor: "(III)Z", annotations: [PRED],
    paramNames: ["a", "b", "result"],
    code: [["iload", 2], ["push", "int", 0], op("gt", "(II)Z"), ["ireturn"]],
  };
  const resultDivides: MethodSpec = {
    name: "result_divides", descriptor: "(III)Z", annotations: [PRED],
    paramNames: ["a", "b", "result"],
    code: [
      ["iload", 0], ["iload", 2], ["irem"], ["push", "int", 0], op("eq", "(II)Z"),
      ["iload", 1], ["iload", 2], ["irem"], ["push", "int", 0], op("eq", "(II)Z"),
      ["iand"], ["ireturn"],
    ],
  };
  return { name: owner, version: 52,
           methods: [gcd, positive, resultPositive, resultDivides] };
}

export function linearSearchClass(): ClassSpec {
  const search: MethodSpec = {
    name: "search", descriptor: "([II)I",
    annotations: [ensure("bounded")],
    paramNames: ["values", "target"],
    code: [
      ["push", "int", 0], ["istore", 2],
      ["label", "head"],
      ["iload", 2], ["aload", 0], ["arraylength"], ["if_icmpge", "miss"],
      ["iload", 2], ["push", "int", 0], op("gte", "(II)Z"), ...invariant,
      ["aload", 0], ["iload", 2], ["iaload"], ["iload", 1], ["if_icmpne", "next"],
      ["iload", 2], ["ireturn"],
      ["label", "next"],
      ["iinc", 2, 1], ["goto", "head"],
      ["label", "miss"],
      ["push", "int", -1], ["ireturn"],
    ],
  };
  const bounded: MethodSpec = {
    name: "bounded", descriptor: "([III)Z", annotations: [PRED],
    paramNames: ["values", "target", "result"],
    code: [
      ["push", "int", -1], ["iload", 2], op("lte", "(II)Z"),
      ["iload", 2], ["aload", 0], ["arraylength"], op("lt", "(II)Z"),
      ["iand"], ["ireturn"],
    ],
  };
  return { name: "corpus.LinearSearch", version: 52, methods: [search, bounded] };
}

/** forall k :: 0 <= k && k < a.length - 1 ==> a[k] <= a[k+1] */
function sortedPredicate(descriptor: string, paramNames: string[]): MethodSpec {
  const bindSlot = paramNames.length; // first free slot (all params are 1-wide)
  return {
    name: "is_sorted", descriptor, annotations: [PRED],
    paramNames,
    code: [
      ["invokestatic", [BINDING, "integer", "()I"]], ["istore", bindSlot],
      ["iload", bindSlot],
      ["push", "int", 0], ["iload", bindSlot], op("lte", "(II)Z"),
      ["iload", bindSlot],
      ["aload", 0], ["arraylength"], ["push", "int", 1], ["isub"],
      op("lt", "(II)Z"),
      ["iand"],
      ["aload", 0], ["iload", bindSlot], ["iaload"],
      ["aload", 0], ["iload", bindSlot], ["push", "int", 1], ["iadd"], ["iaload"],
      op("lte", "(II)Z"),
      op("implies", "(ZZ)Z"),
      op("forall", "(IZ)Z"),
      ["ireturn"],
    ],
  };
}

export function insertionSortClass(): ClassSpec {
  const sort: MethodSpec = {
    name: "sort", descriptor: "([I)V",
    annotations: [ensure("is_sorted")],
    paramNames: ["a"],
    code: [
      ["push", "int", 1], ["istore", 1],            // i = 1
      ["label", "ohead"],
      ["iload", 1], ["aload", 0], ["arraylength"], ["if_icmpge", "oexit"],
      ["iload", 1], ["push", "int", 1], op("gte", "(II)Z"), ...invariant,
      ["aload", 0], ["iload", 1], ["iaload"], ["istore", 2],  // key = a[i]
      ["iload", 1], ["push", "int", 1], ["isub"], ["istore", 3],  // j = i - 1
      ["label", "ihead"],
      ["iload", 3], ["iflt", "iexit"],              // while (j >= 0
      ["aload", 0], ["iload", 3], ["iaload"], ["iload", 2],
      ["if_icmple", "iexit"],                       //     && a[j] > key)
      ["iload", 3], ["push", "int", 0], op("gte", "(II)Z"), ...invariant,
      ["aload", 0],
      ["iload", 3], ["push", "int", 1], ["iadd"],
      ["aload", 0], ["iload", 3], ["iaload"],
      ["iastore"],                                  // a[j+1] = a[j]
      ["iinc", 3, -1],
      ["goto", "ihead"],
      ["label", "iexit"],
      ["aload", 0],
      ["iload", 3], ["push", "int", 1], ["iadd"],
      ["iload", 2],
      ["iastore"],                                  // a[j+1] = key
      ["iinc", 1, 1], ["goto", "ohead"],
      ["label", "oexit"],
      ["return"],
    ],
  };
  return {
    name: "corpus.IntegerInsertionSort", version: 52,
    methods: [sort, sortedPredicate("([I)Z", ["a"])],
  };
}

export function binarySearchClass(): ClassSpec {
  const find: MethodSpec = {
    name: "find", descriptor: "([II)I",
    annotations: [requires("is_sorted"), ensure("bounded")],
    paramNames: ["a", "x"],
    code: [
      ["push", "int", 0], ["istore", 2],            // lo = 0
      ["aload", 0], ["arraylength"], ["push", "int", 1], ["isub"],
      ["istore", 3],                                // hi = a.length - 1
      ["label", "head"],
      ["iload", 2], ["iload", 3], ["if_icmpgt", "miss"],
      ["iload", 2], ["push", "int", 0], op("gte", "(II)Z"),
      ["iload", 3], ["aload", 0], ["arraylength"], ["push", "int", 1], ["isub"],
      op("lte", "(II)Z"),
      ["iand"], ...invariant,
      ["iload", 2], ["iload", 3], ["iadd"], ["push", "int", 2], ["idiv"],
      ["istore", 4],                                // mid = (lo + hi) / 2
      ["aload", 0], ["iload", 4], ["iaload"], ["iload", 1], ["if_icmpne", "ne"],
      ["iload", 4], ["ireturn"],
      ["label", "ne"],
      ["aload", 0], ["iload", 4], ["iaload"], ["iload", 1], ["if_icmpge", "above"],
      ["iload", 4], ["push", "int", 1], ["iadd"], ["istore", 2],  // lo = mid + 1
      ["goto", "head"],
      ["label", "above"],
      ["iload", 4], ["push", "int", 1], ["isub"], ["istore", 3],  // hi = mid - 1
      ["goto", "head"],
      ["label", "miss"],
      ["push", "int", -1], ["ireturn"],
    ],
  };
  const bounded: MethodSpec = {
    name: "bounded", descriptor: "([III)Z", annotations: [PRED],
    paramNames: ["a", "x", "result"],
    code: [
      ["push", "int", -1], ["iload", 2], op("lte", "(II)Z"),
      ["iload", 2], ["aload", 0], ["arraylength"], op("lt", "(II)Z"),
      ["iand"], ["ireturn"],
    ],
  };
  return {
    name: "corpus.BinarySearch", version: 52,
    methods: [find, sortedPredicate("([II)Z", ["a", "x"]), bounded],
  };
}

export function counterClass(): ClassSpec {
  const owner = "corpus.Counter";
  const init: MethodSpec = {
    name: "<init>", descriptor: "()V", access: ACC_PUBLIC,
    annotations: [ensure("zero")],
    code: [
      ["aload", 0],
      ["invokespecial", ["java.lang.Object", "<init>", "()V"]],
      ["aload", 0], ["push", "int", 0],
      ["putfield", [owner, "count", "I"]],
      ["return"],
    ],
  };
  const zero: MethodSpec = {
    name: "zero", descriptor: "()Z", access: ACC_PUBLIC,
    annotations: [PRED],
    code: [
      ["aload", 0], ["getfield", [owner, "count", "I"]],
      ["push", "int", 0], op("eq", "(II)Z"),
      ["ireturn"],
    ],
  };
  const increment: MethodSpec = {
    name: "increment", descriptor: "()V", access: ACC_PUBLIC,
    annotations: [ensure("inc")],
    code: [
      ["aload", 0], ["aload", 0],
      ["getfield", [owner, "count", "I"]],
      ["push", "int", 1], ["iadd"],
      ["putfield", [owner, "count", "I"]],
      ["return"],
    ],
  };
  const inc: MethodSpec = {
    name: "inc", descriptor: "()Z", access: ACC_PUBLIC,
    annotations: [PRED],
    code: [
      ["aload", 0], ["getfield", [owner, "count", "I"]],
      ["aload", 0], ["getfield", [owner, "count", "I"]],
      op("old", "(I)I"),
      op("gt", "(II)Z"),
      ["ireturn"],
    ],
  };
  const get: MethodSpec = {
    name: "get", descriptor: "()I", access: ACC_PUBLIC,
    annotations: [PUREANN],
    code: [["aload", 0], ["getfield", [owner, "count", "I"]], ["ireturn"]],
  };
  return {
    name: owner,
    version: 52,
    fields: [{ name: "count", descriptor: "I", access: ACC_PRIVATE }],
    methods: [init, zero, increment, inc, get],
    defaultInit: false,
  };
}

export interface CorpusEntry {
  spec: ClassSpec;
  entryClass: string;
  sourceLevel: 8 | 17;
}

export function corpus(): CorpusEntry[] {
  return [
    { spec: summary1Class(), entryClass: "corpus.Summary1", sourceLevel: 8 },
    { spec: summary2Class(), entryClass: "corpus.Summary2", sourceLevel: 17 },
    { spec: gcdClass(), entryClass: "corpus.Gcd", sourceLevel: 8 },
    { spec: linearSearchClass(), entryClass: "corpus.LinearSearch", sourceLevel: 8 },
    { spec: insertionSortClass(), entryClass: "corpus.IntegerInsertionSort", sourceLevel: 8 },
    { spec: binarySearchClass(), entryClass: "corpus.BinarySearch", sourceLevel: 8 },
    { spec: counterClass(), entryClass: "corpus.Counter", sourceLevel: 8 },
  ];
}

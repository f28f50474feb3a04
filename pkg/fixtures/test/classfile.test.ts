import { describe, expect, it } from "vitest";

import { writeClass } from "../src/classfile";
import { libraryClasses, operatorsClass } from "../src/bblib";
import { corpus } from "../src/corpus";

describe("classfile writer", () => {
  it("emits the magic word and version", () => {
    const data = writeClass({ name: "t.A", version: 61 });
    expect(Array.from(data.slice(0, 4))).toEqual([0xca, 0xfe, 0xba, 0xbe]);
    expect((data[6] << 8) | data[7]).toBe(61);
  });

  it("gives every corpus entry its declared version", () => {
    for (const entry of corpus()) {
      const data = writeClass(entry.spec);
      const version = (data[6] << 8) | data[7];
      expect(version).toBe(entry.sourceLevel === 17 ? 61 : 52);
    }
  });

  it("computes stack limits for straight-line code", () => {
    expect(() => writeClass({
      name: "t.B",
      methods: [{
        name: "f", descriptor: "(II)I",
        code: [["iload", 0], ["iload", 1], ["iadd"], ["ireturn"]],
      }],
    })).not.toThrow();
  });

  it("rejects inconsistent stack depths", () => {
    expect(() => writeClass({
      name: "t.C",
      methods: [{
        name: "f", descriptor: "(I)I",
        code: [
          ["iload", 0], ["ifeq", "merge"],
          ["push", "int", 1],
          ["label", "merge"],
          ["push", "int", 2], ["iadd"], ["ireturn"],
        ],
      }],
    })).toThrow(/inconsistent stack depth/);
  });

  it("rejects branches to undefined labels", () => {
    expect(() => writeClass({
      name: "t.D",
      methods: [{ name: "f", descriptor: "()V", code: [["goto", "nowhere"], ["return"]] }],
    })).toThrow(/undefined label/);
  });

  it("deduplicates constant pool entries", () => {
    const one = writeClass({
      name: "t.E",
      methods: [{
        name: "f", descriptor: "()I",
        code: [["push", "int", 100000], ["push", "int", 100000], ["iadd"], ["ireturn"]],
      }],
    });
    const two = writeClass({
      name: "t.E",
      methods: [{
        name: "f", descriptor: "()I",
        code: [["push", "int", 100000], ["push", "int", 100001], ["iadd"], ["ireturn"]],
      }],
    });
    expect(two.length).toBeGreaterThan(one.length);
  });

  it("covers every operator overload the convention names", () => {
    const ops = operatorsClass();
    const names = new Set(ops.methods!.map((m) => `${m.name}${m.descriptor}`));
    for (const want of [
      "lt(II)Z", "lte(JJ)Z", "gt(DD)Z", "gte(FF)Z", "eq(ZZ)Z", "neq(II)Z",
      "not(Z)Z", "implies(ZZ)Z", "conditional(ZII)I", "forall(IZ)Z",
      "exists(DZ)Z", "old(J)J", "invariant(Z)V", "assertion(Z)V", "assumption(Z)V",
    ]) {
      expect(names.has(want), want).toBe(true);
    }
  });

  it("generates the full library and corpus without errors", () => {
    for (const spec of libraryClasses()) {
      expect(writeClass(spec).length).toBeGreaterThan(20);
    }
    for (const entry of corpus()) {
      expect(writeClass(entry.spec).length).toBeGreaterThan(100);
    }
  });
});

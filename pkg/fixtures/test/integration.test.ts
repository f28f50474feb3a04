/**
 * End-to-end: generate the corpus, translate every program through the
 * command-line front-end, compare the two summary variants' contract
 * clauses, and (when a Boogie binary is available) verify the outputs.
 */

import { execFileSync, spawnSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { beforeAll, describe, expect, it } from "vitest";

import { generate } from "../src/main";
import { corpus } from "../src/corpus";

const workDir = fs.mkdtempSync(path.join(os.tmpdir(), "fixture-corpus-"));
const classesDir = path.join(workDir, "classes");
const outDir = path.join(workDir, "bpl");

function translate(entryClass: string): { status: number; output: string } {
  const outFile = path.join(outDir, entryClass + ".bpl");
  const result = spawnSync("python3", [
    "-m", "jvm2boogie.cli",
    "--classpath", classesDir,
    "--class", entryClass,
    "--output", outFile,
  ], { encoding: "utf8" });
  return {
    status: result.status ?? -1,
    output: fs.existsSync(outFile) ? fs.readFileSync(outFile, "utf8") : "",
  };
}

/** contract clauses of a procedure, with mangled names reduced to simple ones */
function contractClauses(bpl: string, procName: string): string[] {
  const demangled = bpl.replace(/[A-Za-z_$][\w.$]*\.([A-Za-z_$][\w$]*)#[0-9a-f]{8}/g, "$1");
  const match = demangled.match(
    new RegExp(`procedure ${procName}\\([^)]*\\)[^\\n]*\\n((?:  .*\\n)*)`));
  expect(match, `procedure ${procName} not found`).toBeTruthy();
  return match![1]
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.startsWith("requires") || line.startsWith("ensures"))
    .sort();
}

beforeAll(() => {
  fs.mkdirSync(outDir, { recursive: true });
  generate(classesDir);
});

describe("corpus end-to-end", () => {
  it("library operator bodies satisfy the aggregability convention", () => {
    const operators = path.join(classesDir, "byteback/annotations/Operators.class");
    const script = path.join(__dirname, "..", "scripts", "check_operators.py");
    const out = execFileSync("python3", [script, operators], { encoding: "utf8" });
    expect(out).toMatch(/0 failures/);
  });

  for (const entry of corpus()) {
    it(`translates ${entry.entryClass} (level ${entry.sourceLevel}) with exit 0`, () => {
      const { status, output } = translate(entry.entryClass);
      expect(status).toBe(0);
      expect(output.length).toBeGreaterThan(0);
    });
  }

  it("summary1 and summary2 have identical contract clause sets", () => {
    const one = translate("corpus.Summary1");
    const two = translate("corpus.Summary2");
    expect(one.status).toBe(0);
    expect(two.status).toBe(0);
    const c1 = contractClauses(one.output, "summary1");
    const c2 = contractClauses(two.output, "summary2");
    expect(c1).toEqual(c2);
    expect(c1).toEqual([
      "ensures @ret >= 0;",
      "requires !contains(#heap, values, 1, 0, lengthof(values));",
    ]);
  });

  it("counter postconditions use old() in the paper's form", () => {
    const { status, output } = translate("corpus.Counter");
    expect(status).toBe(0);
    expect(output).toMatch(
      /ensures read\(#heap, this, corpus\.Counter\.count\) > old\(read\(#heap, this, corpus\.Counter\.count\)\);/);
  });

  it("verifies the emitted files when a Boogie binary is present", () => {
    const probe = spawnSync("boogie", ["/help"], { encoding: "utf8" });
    if (probe.error) {
      console.log("NOTICE: no external Boogie binary on PATH; verification sub-check skipped");
      return;
    }
    for (const entry of corpus()) {
      const outFile = path.join(outDir, entry.entryClass + ".bpl");
      const result = spawnSync("boogie", [outFile], { encoding: "utf8" });
      expect(result.status, entry.entryClass).toBe(0);
      expect(result.stdout).toMatch(/0 errors/);
    }
  });
});

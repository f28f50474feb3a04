/** Build script: write the annotation library and the corpus classfiles
 * into a directory consumable as a `--classpath` root. */

import * as fs from "fs";
import * as path from "path";

import { writeClass } from "./classfile";
import { libraryClasses } from "./bblib";
import { corpus } from "./corpus";

export function generate(outDir: string): string[] {
  const written: string[] = [];
  const all = [...libraryClasses(), ...corpus().map((c) => c.spec)];
  for (const spec of all) {
    const rel = spec.name.replace(/\./g, "/") + ".class";
    const file = path.join(outDir, rel);
    fs.mkdirSync(path.dirname(file), { recursive: true });
    fs.writeFileSync(file, writeClass(spec));
    written.push(rel);
  }
  return written;
}

if (require.main === module) {
  const outDir = process.argv[2] ?? "out/classes";
  const written = generate(outDir);
  for (const rel of written) console.log(rel);
  console.log(`wrote ${written.length} classfiles to ${outDir}`);
}

/**
 * render --spec PATH [--out PATH]
 *
 * Renders one figure per invocation from the CSV artifacts named in the
 * spec file. Exit status: 0 on success, 1 for missing/garbled CSV data
 * (the message names the offending file and column), 2 for usage or
 * figure-spec errors.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import path from "node:path";
import { pathToFileURL } from "node:url";

import { CsvError } from "./csv.js";
import { FigureSpecError, renderFigure } from "./figures.js";
import { loadSpec } from "./spec.js";

const USAGE = "usage: render --spec PATH [--out PATH]";

export function main(argv: string[]): number {
  let specPath: string | undefined;
  let outPath: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--spec" && i + 1 < argv.length) specPath = argv[++i];
    else if (argv[i] === "--out" && i + 1 < argv.length) outPath = argv[++i];
    else {
      console.error(`unexpected argument "${argv[i]}"\n${USAGE}`);
      return 2;
    }
  }
  if (!specPath) {
    console.error(USAGE);
    return 2;
  }

  try {
    const spec = loadSpec(specPath);
    const out = outPath ?? spec.output;
    if (!out) {
      console.error(`error: no output path (pass --out or set "output" in ${specPath})`);
      return 2;
    }
    const svg = renderFigure(spec);
    mkdirSync(path.dirname(out), { recursive: true });
    writeFileSync(out, svg);
    console.log(`SVG -> ${out}`);
    return 0;
  } catch (err) {
    if (err instanceof FigureSpecError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    if (err instanceof CsvError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const entry = process.argv[1] ? pathToFileURL(process.argv[1]).href : "";
if (import.meta.url === entry) {
  process.exit(main(process.argv.slice(2)));
}

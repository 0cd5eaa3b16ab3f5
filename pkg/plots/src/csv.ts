/**
 * Strict reader for the scenario CSV artifacts: header row, comma separators,
 * no quoting. Every failure names the file and, where it applies, the column,
 * so a renderer exit message points at the offending data.
 */

import { readFileSync } from "node:fs";

export class CsvError extends Error {}

export class Table {
  constructor(
    readonly path: string,
    readonly header: string[],
    private readonly cells: string[][],
  ) {}

  get rowCount(): number {
    return this.cells.length;
  }

  private columnIndex(name: string): number {
    const idx = this.header.indexOf(name);
    if (idx < 0) {
      throw new CsvError(`${this.path}: missing column "${name}"`);
    }
    return idx;
  }

  /** Raw string cells of one column. */
  raw(name: string): string[] {
    const idx = this.columnIndex(name);
    return this.cells.map((row) => row[idx]);
  }

  /** One column parsed as finite numbers; bad cells are reported by line. */
  column(name: string): number[] {
    const idx = this.columnIndex(name);
    return this.cells.map((row, i) => {
      const value = Number(row[idx]);
      if (!Number.isFinite(value)) {
        throw new CsvError(
          `${this.path} line ${i + 2}: bad value "${row[idx]}" in column "${name}"`,
        );
      }
      return value;
    });
  }
}

export function readTable(path: string, required: string[]): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new CsvError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const lines = text.split("\n");
  while (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  if (lines.length === 0) {
    throw new CsvError(`${path}: empty file`);
  }
  const header = lines[0].split(",");
  for (const name of required) {
    if (!header.includes(name)) {
      throw new CsvError(`${path}: missing column "${name}"`);
    }
  }
  const width = header.length;
  const cells = lines.slice(1).map((line, i) => {
    const row = line.split(",");
    if (row.length !== width) {
      throw new CsvError(
        `${path} line ${i + 2}: expected ${width} fields, got ${row.length}`,
      );
    }
    return row;
  });
  if (cells.length === 0) {
    throw new CsvError(`${path}: no data rows`);
  }
  return new Table(path, header, cells);
}

/** Piecewise-linear interpolation of (xs, ys) at x; xs must be increasing. */
export function interp(xs: number[], ys: number[], x: number): number {
  if (x <= xs[0]) return ys[0];
  if (x >= xs[xs.length - 1]) return ys[ys.length - 1];
  let lo = 0;
  let hi = xs.length - 1;
  while (hi - lo > 1) {
    const mid = (lo + hi) >> 1;
    if (xs[mid] <= x) lo = mid;
    else hi = mid;
  }
  const w = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + w * (ys[hi] - ys[lo]);
}

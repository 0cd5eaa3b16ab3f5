import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import { describe, expect, it } from "vitest";

import { CsvError, interp, readTable } from "../src/csv.js";

function write(dir: string, name: string, text: string): string {
  const p = path.join(dir, name);
  writeFileSync(p, text);
  return p;
}

describe("readTable", () => {
  it("parses columns by name", () => {
    const dir = mkdtempSync(path.join(tmpdir(), "csv-"));
    const p = write(dir, "a.csv", "t,value\n0.0,1.5\n1.0,2.5\n");
    const table = readTable(p, ["t", "value"]);
    expect(table.rowCount).toBe(2);
    expect(table.column("value")).toEqual([1.5, 2.5]);
    expect(table.raw("t")).toEqual(["0.0", "1.0"]);
  });

  it("names a missing file", () => {
    expect(() => readTable("/nonexistent/x.csv", ["t"])).toThrowError(
      /cannot read \/nonexistent\/x.csv/,
    );
  });

  it("names a missing column", () => {
    const dir = mkdtempSync(path.join(tmpdir(), "csv-"));
    const p = write(dir, "a.csv", "t,value\n0.0,1.5\n");
    expect(() => readTable(p, ["envelope"])).toThrowError(/missing column "envelope"/);
  });

  it("names a garbled cell with its column and line", () => {
    const dir = mkdtempSync(path.join(tmpdir(), "csv-"));
    const p = write(dir, "a.csv", "t,value\n0.0,1.5\n1.0,oops\n");
    const table = readTable(p, ["value"]);
    expect(() => table.column("value")).toThrowError(
      /line 3: bad value "oops" in column "value"/,
    );
  });

  it("rejects ragged rows and empty files", () => {
    const dir = mkdtempSync(path.join(tmpdir(), "csv-"));
    const ragged = write(dir, "r.csv", "a,b\n1,2,3\n");
    expect(() => readTable(ragged, [])).toThrowError(/expected 2 fields, got 3/);
    const headerOnly = write(dir, "h.csv", "a,b\n");
    expect(() => readTable(headerOnly, [])).toThrowError(/no data rows/);
    expect(() => readTable(write(dir, "e.csv", ""), [])).toThrowError(CsvError);
  });
});

describe("interp", () => {
  it("is linear between samples and clamps outside", () => {
    const xs = [0, 1, 3];
    const ys = [0, 10, 30];
    expect(interp(xs, ys, 0.5)).toBeCloseTo(5, 12);
    expect(interp(xs, ys, 2)).toBeCloseTo(20, 12);
    expect(interp(xs, ys, -1)).toBe(0);
    expect(interp(xs, ys, 9)).toBe(30);
  });
});

/** Figure spec files: JSON with kind, input CSV paths, optional output path. */

import { readFileSync } from "node:fs";
import path from "node:path";

import { FIGURE_KINDS, FigureKind, FigureSpec, FigureSpecError } from "./figures.js";

export function loadSpec(specPath: string): FigureSpec {
  let text: string;
  try {
    text = readFileSync(specPath, "utf-8");
  } catch (err) {
    throw new FigureSpecError(`cannot read ${specPath}: ${(err as Error).message}`);
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch (err) {
    throw new FigureSpecError(`${specPath}: invalid JSON (${(err as Error).message})`);
  }
  if (typeof parsed !== "object" || parsed === null) {
    throw new FigureSpecError(`${specPath}: expected a JSON object`);
  }
  const obj = parsed as Record<string, unknown>;

  const kind = obj.kind;
  if (typeof kind !== "string" || !(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new FigureSpecError(
      `${specPath}: "kind" must be one of ${FIGURE_KINDS.join(", ")}, got ${JSON.stringify(kind)}`,
    );
  }

  const inputs = obj.inputs;
  if (typeof inputs !== "object" || inputs === null || Array.isArray(inputs)) {
    throw new FigureSpecError(`${specPath}: "inputs" must be an object of CSV paths`);
  }
  const resolved: Record<string, string | string[]> = {};
  const base = path.dirname(specPath);
  for (const [key, value] of Object.entries(inputs as Record<string, unknown>)) {
    if (typeof value === "string") {
      resolved[key] = path.resolve(base, value);
    } else if (Array.isArray(value) && value.every((v) => typeof v === "string")) {
      resolved[key] = value.map((v) => path.resolve(base, v as string));
    } else {
      throw new FigureSpecError(
        `${specPath}: input "${key}" must be a path or a list of paths`,
      );
    }
  }

  const output = obj.output;
  if (output !== undefined && typeof output !== "string") {
    throw new FigureSpecError(`${specPath}: "output" must be a path`);
  }

  return {
    kind: kind as FigureKind,
    inputs: resolved,
    output: output === undefined ? undefined : path.resolve(base, output),
  };
}

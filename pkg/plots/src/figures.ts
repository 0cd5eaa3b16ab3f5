/**
 * The five figure kinds rendered from the scenario CSV artifacts.
 *
 * Input conventions (paths live in the figure spec, see spec.ts):
 *   profiles        profiles: string[] (profile_%04d.csv), times: times.csv
 *   blowup_monitor  monitors: monitors.csv, envelope: envelope.csv,
 *                   blowup: blowup.csv
 *   barrier_overlay profiles: string[], times: times.csv, barrier: barrier.csv
 *   energy          energy: energy.csv
 *   hopf_energy     hopf: hopf.csv
 */

import { interp, readTable } from "./csv.js";
import { buildChart, fmtNum, rampColor, Series } from "./svg.js";

export const FIGURE_KINDS = [
  "profiles",
  "blowup_monitor",
  "barrier_overlay",
  "energy",
  "hopf_energy",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  inputs: Record<string, string | string[]>;
  output?: string;
}

export class FigureSpecError extends Error {}

function stringInput(spec: FigureSpec, key: string): string {
  const value = spec.inputs[key];
  if (typeof value !== "string") {
    throw new FigureSpecError(`figure kind "${spec.kind}" needs input "${key}" (a CSV path)`);
  }
  return value;
}

function listInput(spec: FigureSpec, key: string): string[] {
  const value = spec.inputs[key];
  if (!Array.isArray(value) || value.length === 0 || value.some((v) => typeof v !== "string")) {
    throw new FigureSpecError(
      `figure kind "${spec.kind}" needs input "${key}" (a non-empty list of CSV paths)`,
    );
  }
  return value;
}

// ---------------------------------------------------------------------------
// monitor diagnostics (shared between the blowup_monitor subtitle and tests)

export interface MonitorDiagnostics {
  tDetect: number;
  gFinal: number;
  /** monitor samples with t > T0/2 (none for any validated parameter set:
   *  the core collapses on a far faster scale than the envelope's) */
  samplesAfterHalfT0: number;
  /** nondecreasing over those samples; vacuously true when there are none */
  monotoneAfterHalfT0: boolean;
  /** nondecreasing over the last half of the recorded series (non-vacuous) */
  monotoneLastHalf: boolean;
  /** every sample at or above the interpolated analytic envelope */
  aboveEnvelope: boolean;
  worstEnvelopeRatio: number;
}

function nondecreasing(values: number[]): boolean {
  for (let i = 1; i < values.length; i++) {
    if (values[i] < values[i - 1]) return false;
  }
  return true;
}

export function monitorDiagnostics(
  t: number[],
  g: number[],
  envT: number[],
  envValue: number[],
  t0: number,
): MonitorDiagnostics {
  const tLast = t[t.length - 1];
  const afterHalfT0 = g.filter((_, i) => t[i] > 0.5 * t0);
  const lastHalf = g.filter((_, i) => t[i] >= 0.5 * tLast);
  let worst = Infinity;
  for (let i = 0; i < t.length; i++) {
    worst = Math.min(worst, g[i] / interp(envT, envValue, t[i]));
  }
  return {
    tDetect: tLast,
    gFinal: g[g.length - 1],
    samplesAfterHalfT0: afterHalfT0.length,
    monotoneAfterHalfT0: nondecreasing(afterHalfT0),
    monotoneLastHalf: nondecreasing(lastHalf),
    aboveEnvelope: worst >= 1.0,
    worstEnvelopeRatio: worst,
  };
}

// ---------------------------------------------------------------------------
// renderers

function profileFan(paths: string[], timesPath: string): Series[] {
  const times = readTable(timesPath, ["snapshot", "t"]).column("t");
  if (times.length !== paths.length) {
    throw new FigureSpecError(
      `${timesPath} lists ${times.length} snapshots but ${paths.length} profile files were given`,
    );
  }
  return paths.map((path, i) => {
    const table = readTable(path, ["r", "phi"]);
    return {
      xs: table.column("r"),
      ys: table.column("phi"),
      color: rampColor(i, paths.length),
      label: `t = ${fmtNum(times[i])}`,
      width: 1.0,
    };
  });
}

function renderProfiles(spec: FigureSpec): string {
  const series = profileFan(listInput(spec, "profiles"), stringInput(spec, "times"));
  const tFirst = series[0].label;
  const tLast = series[series.length - 1].label;
  return buildChart({
    title: "Director angle profiles",
    subtitle: `${series.length} snapshots, ${tFirst} to ${tLast}`,
    xLabel: "r",
    yLabel: "phi(r, t)",
    series,
    legend: "ends",
  });
}

function renderBlowupMonitor(spec: FigureSpec): string {
  const monitors = readTable(stringInput(spec, "monitors"), ["t", "phi_r_at_0"]);
  const envelope = readTable(stringInput(spec, "envelope"), ["t", "envelope"]);
  const blowup = readTable(stringInput(spec, "blowup"), ["t0_analytic"]);

  const t = monitors.column("t");
  const g = monitors.column("phi_r_at_0");
  const envT = envelope.column("t");
  const envValue = envelope.column("envelope");
  const t0 = blowup.column("t0_analytic")[0];
  const diag = monitorDiagnostics(t, g, envT, envValue, t0);

  const positive = g.every((v) => v > 0) && envValue.every((v) => v > 0);
  const afterHalf =
    diag.samplesAfterHalfT0 === 0
      ? "no monitor samples after T0/2 (collapse races the envelope)"
      : `monotone after T0/2: ${diag.monotoneAfterHalfT0}`;
  return buildChart({
    title: "Origin slope vs analytic envelope",
    subtitle:
      `t_detect = ${fmtNum(diag.tDetect)}, slope reached ${fmtNum(diag.gFinal)}; ` +
      `min slope/envelope = ${diag.worstEnvelopeRatio.toPrecision(6)}; ${afterHalf}`,
    xLabel: "t",
    yLabel: "phi_r(0, t)",
    series: [
      { xs: t, ys: g, color: "#2654bd", label: "phi_r(0, t)", width: 1.4 },
      {
        xs: envT,
        ys: envValue,
        color: "#2d6a4f",
        label: "envelope 2/(e^t beta)",
        dash: "6,3",
        width: 1.0,
      },
    ],
    vLines: [{ value: t0, color: "#9d4edd", label: `T0 = ${fmtNum(t0)}` }],
    yLog: positive,
    xMin: 0,
  });
}

function renderBarrierOverlay(spec: FigureSpec): string {
  const fan = profileFan(listInput(spec, "profiles"), stringInput(spec, "times"));
  const barrier = readTable(stringInput(spec, "barrier"), ["r", "t", "f"]);
  const r = barrier.column("r");
  const t = barrier.column("t");
  const f = barrier.column("f");

  // barrier.csv is a (r, t) product grid flattened with t varying per block
  const distinct: number[] = [];
  for (const value of t) {
    if (distinct.length === 0 || distinct[distinct.length - 1] !== value) {
      distinct.push(value);
    }
  }
  const barriers: Series[] = distinct.map((tv, i) => {
    const xs: number[] = [];
    const ys: number[] = [];
    for (let j = 0; j < t.length; j++) {
      if (t[j] === tv) {
        xs.push(r[j]);
        ys.push(f[j]);
      }
    }
    return {
      xs,
      ys,
      color: "#666",
      label: `barrier t = ${fmtNum(tv)}`,
      dash: "4,3",
      width: 0.8,
      opacity: 0.75,
    };
  });

  return buildChart({
    title: "Solution profiles over the subsolution barrier",
    subtitle: `${fan.length} solution snapshots (solid), ${barriers.length} barrier curves (dashed)`,
    xLabel: "r",
    yLabel: "phi(r, t)",
    series: [...fan, ...barriers],
    legend: "ends",
  });
}

function renderEnergy(spec: FigureSpec): string {
  const table = readTable(stringInput(spec, "energy"), [
    "t",
    "grad_u_sq",
    "convective",
    "grad_d_sq",
    "tension_sq",
    "boundary_flux",
  ]);
  const t = table.column("t");
  const palette: [string, string][] = [
    ["grad_u_sq", "#2654bd"],
    ["convective", "#d62839"],
    ["grad_d_sq", "#2d6a4f"],
    ["tension_sq", "#e09f3e"],
    ["boundary_flux", "#9d4edd"],
  ];
  return buildChart({
    title: "Energy ledger",
    subtitle: `${t.length} snapshots`,
    xLabel: "t",
    yLabel: "integral value",
    series: palette.map(([name, color]) => ({
      xs: t,
      ys: table.column(name),
      color,
      label: name,
      markers: true,
    })),
  });
}

function renderHopfEnergy(spec: FigureSpec): string {
  const table = readTable(stringInput(spec, "hopf"), ["lambda", "energy_s3", "energy_ball"]);
  const lambdas = table.column("lambda");
  const xs = lambdas.map(Math.log2);
  return buildChart({
    title: "Hopf data energy under dilation",
    subtitle: `lambda from ${fmtNum(lambdas[0])} to ${fmtNum(lambdas[lambdas.length - 1])}`,
    xLabel: "dilation lambda (log2 axis)",
    yLabel: "Dirichlet energy",
    series: [
      {
        xs,
        ys: table.column("energy_s3"),
        color: "#2654bd",
        label: "sphere energy",
        markers: true,
      },
      {
        xs,
        ys: table.column("energy_ball"),
        color: "#d62839",
        label: "ball energy",
        markers: true,
      },
    ],
    xTicks: xs,
    xTickFormat: (v) => fmtNum(Math.pow(2, v)),
  });
}

export function renderFigure(spec: FigureSpec): string {
  switch (spec.kind) {
    case "profiles":
      return renderProfiles(spec);
    case "blowup_monitor":
      return renderBlowupMonitor(spec);
    case "barrier_overlay":
      return renderBarrierOverlay(spec);
    case "energy":
      return renderEnergy(spec);
    case "hopf_energy":
      return renderHopfEnergy(spec);
    default:
      throw new FigureSpecError(
        `unknown figure kind "${(spec as FigureSpec).kind}"; expected one of ${FIGURE_KINDS.join(", ")}`,
      );
  }
}

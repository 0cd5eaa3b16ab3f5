/**
 * Hand-built SVG line charts: axes, grid, ticks, legend, reference lines.
 * No fonts are measured and no timestamps are embedded, so rendering the
 * same data twice yields byte-identical output.
 */

export interface Series {
  xs: number[];
  ys: number[];
  color: string;
  label: string;
  width?: number;
  dash?: string; // stroke-dasharray
  markers?: boolean;
  opacity?: number;
}

/** Vertical reference line (e.g. the analytic vanishing time). */
export interface VLine {
  value: number;
  color: string;
  label: string;
  dash?: string;
}

export interface ChartOpts {
  title: string;
  subtitle?: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  vLines?: VLine[];
  /** log10 y axis with decade ticks; every y value must be positive. */
  yLog?: boolean;
  /** explicit x tick positions (data units) with optional formatter */
  xTicks?: number[];
  xTickFormat?: (v: number) => string;
  xMin?: number;
  xMax?: number;
  yMin?: number;
  yMax?: number;
  /** "full" legend (default), first-and-last only, or none */
  legend?: "full" | "ends" | "none";
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const nice = [1, 2, 5, 10].map((m) => m * mag);
  const step = nice.find((n) => n >= rough) ?? rough;
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function fmtNum(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e5 || a < 1e-3) return v.toExponential(0).replace("+", "");
  if (Number.isInteger(v)) return String(v);
  return String(parseFloat(v.toPrecision(4)));
}

/** Two-stop color ramp for profile fans (early -> late). */
export function rampColor(i: number, n: number): string {
  const t = n <= 1 ? 0 : i / (n - 1);
  const from = [38, 84, 189]; // blue
  const to = [214, 40, 57]; // red
  const c = from.map((f, k) => Math.round(f + (to[k] - f) * t));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

export function buildChart(opts: ChartOpts): string {
  const { series, vLines = [] } = opts;
  const W = 700;
  const H = 320;
  const ml = 64;
  const mr = 18;
  const mt = 34;
  const mb = 46;
  const pw = W - ml - mr;
  const ph = H - mt - mb;

  const ty = (v: number) => (opts.yLog ? Math.log10(v) : v);

  const allX = series.flatMap((s) => s.xs);
  const allY = series.flatMap((s) => s.ys);
  if (opts.yLog && allY.some((v) => v <= 0)) {
    throw new Error("log-scale y axis requires positive values");
  }
  const xMin = opts.xMin ?? Math.min(...allX, ...vLines.map((l) => l.value));
  const xMax = opts.xMax ?? Math.max(...allX, ...vLines.map((l) => l.value));
  const yLo = ty(opts.yMin ?? Math.min(...allY));
  const yHi = ty(opts.yMax ?? Math.max(...allY));
  const pad = (yHi - yLo || 1) * 0.06;
  const yMin = opts.yMin !== undefined && !opts.yLog ? ty(opts.yMin) : yLo - pad;
  const yMax = yHi + pad;

  const xOf = (v: number) => ml + ((v - xMin) / (xMax - xMin || 1)) * pw;
  const yOf = (v: number) => mt + ph - ((ty(v) - yMin) / (yMax - yMin || 1)) * ph;

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  s += `<text x="${ml}" y="${mt - 18}" font-size="11" font-weight="600" fill="#222">${esc(opts.title)}</text>\n`;
  if (opts.subtitle) {
    s += `<text x="${ml}" y="${mt - 6}" font-size="7.5" fill="#888">${esc(opts.subtitle)}</text>\n`;
  }
  s += `<defs><clipPath id="plot"><rect x="${ml}" y="${mt}" width="${pw}" height="${ph}"/></clipPath></defs>\n`;

  // y grid + ticks
  let yTicks: number[];
  if (opts.yLog) {
    const lo = Math.ceil(yMin);
    const hi = Math.floor(yMax);
    yTicks = [];
    for (let d = lo; d <= hi; d++) yTicks.push(Math.pow(10, d));
  } else {
    yTicks = niceTicks(yMin, yMax, 5);
  }
  for (const v of yTicks) {
    const y = yOf(opts.yLog ? v : v).toFixed(2);
    s += `<line x1="${ml}" y1="${y}" x2="${ml + pw}" y2="${y}" stroke="#eee" stroke-width="0.5"/>\n`;
    s += `<text x="${ml - 5}" y="${y}" font-size="8" fill="#555" text-anchor="end" dominant-baseline="middle">${fmtNum(v)}</text>\n`;
  }

  // x ticks
  const xTicks = opts.xTicks ?? niceTicks(xMin, xMax, 6);
  const xFmt = opts.xTickFormat ?? fmtNum;
  for (const v of xTicks) {
    if (v < xMin - 1e-12 || v > xMax + 1e-12) continue;
    const x = xOf(v).toFixed(2);
    s += `<line x1="${x}" y1="${mt + ph}" x2="${x}" y2="${mt + ph + 4}" stroke="#555" stroke-width="0.7"/>\n`;
    s += `<text x="${x}" y="${mt + ph + 14}" font-size="8" fill="#555" text-anchor="middle">${esc(xFmt(v))}</text>\n`;
  }

  // frame + axis labels
  s += `<rect x="${ml}" y="${mt}" width="${pw}" height="${ph}" fill="none" stroke="#999" stroke-width="0.8"/>\n`;
  s += `<text x="${ml + pw / 2}" y="${H - 10}" font-size="9" fill="#333" text-anchor="middle">${esc(opts.xLabel)}</text>\n`;
  s += `<text x="14" y="${mt + ph / 2}" font-size="9" fill="#333" text-anchor="middle" transform="rotate(-90 14 ${mt + ph / 2})">${esc(opts.yLabel)}</text>\n`;

  // vertical reference lines
  for (const line of vLines) {
    if (line.value < xMin || line.value > xMax) continue;
    const x = xOf(line.value).toFixed(2);
    s += `<line x1="${x}" y1="${mt}" x2="${x}" y2="${mt + ph}" stroke="${line.color}" stroke-width="0.9" stroke-dasharray="${line.dash ?? "5,3"}"/>\n`;
    s += `<text x="${(xOf(line.value) + 3).toFixed(2)}" y="${mt + 10}" font-size="7.5" fill="${line.color}">${esc(line.label)}</text>\n`;
  }

  // series
  for (const ser of series) {
    const pts = ser.xs
      .map((x, i) => `${xOf(x).toFixed(2)},${yOf(ser.ys[i]).toFixed(2)}`)
      .join(" ");
    const dash = ser.dash ? ` stroke-dasharray="${ser.dash}"` : "";
    const opacity = ser.opacity !== undefined ? ` opacity="${ser.opacity}"` : "";
    s += `<polyline clip-path="url(#plot)" points="${pts}" fill="none" stroke="${ser.color}" stroke-width="${ser.width ?? 1.2}"${dash}${opacity}/>\n`;
    if (ser.markers) {
      for (let i = 0; i < ser.xs.length; i++) {
        s += `<circle clip-path="url(#plot)" cx="${xOf(ser.xs[i]).toFixed(2)}" cy="${yOf(ser.ys[i]).toFixed(2)}" r="2.2" fill="${ser.color}"${opacity}/>\n`;
      }
    }
  }

  // legend
  const mode = opts.legend ?? "full";
  let entries: Series[] = [];
  if (mode === "full") entries = series;
  else if (mode === "ends" && series.length > 0) {
    entries = series.length > 1 ? [series[0], series[series.length - 1]] : [series[0]];
  }
  if (entries.length > 0) {
    const lx = ml + pw - 150;
    let ly = mt + 8;
    for (const ser of entries) {
      const dash = ser.dash ? ` stroke-dasharray="${ser.dash}"` : "";
      s += `<line x1="${lx}" y1="${ly}" x2="${lx + 16}" y2="${ly}" stroke="${ser.color}" stroke-width="${ser.width ?? 1.2}"${dash}/>\n`;
      s += `<text x="${lx + 20}" y="${ly + 2.5}" font-size="7.5" fill="#333">${esc(ser.label)}</text>\n`;
      ly += 11;
    }
  }

  s += "</svg>\n";
  return s;
}

/**
 * Minimal deterministic SVG building blocks: linear/log scales, axis
 * ticks, polylines, markers.  Coordinates are emitted with fixed
 * precision so a re-render of the same data is byte-identical.
 */

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function fmt(v: number): string {
  return v.toFixed(2);
}

export interface Scale {
  (v: number): number;
  readonly min: number;
  readonly max: number;
  readonly log: boolean;
}

export function makeScale(
  min: number,
  max: number,
  pixelLo: number,
  pixelHi: number,
  log: boolean,
): Scale {
  if (!(min < max)) {
    // Degenerate ranges (single data point) get a symmetric pad so the
    // point lands mid-axis instead of dividing by zero.
    const pad = log ? 2 : Math.max(1, Math.abs(min));
    min = log ? min / pad : min - pad;
    max = log ? max * pad : max + pad;
  }
  const lo = log ? Math.log10(min) : min;
  const hi = log ? Math.log10(max) : max;
  const scale = (v: number): number => {
    const u = log ? Math.log10(v) : v;
    return pixelLo + ((u - lo) / (hi - lo)) * (pixelHi - pixelLo);
  };
  return Object.assign(scale, { min, max, log } as const);
}

export function linearTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rough) ?? rough;
  const out: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function decadeTicks(min: number, max: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(min) - 1e-9); e <= Math.floor(Math.log10(max) + 1e-9); e++) {
    out.push(Math.pow(10, e));
  }
  // A range narrower than one decade still needs at least its endpoints.
  if (out.length === 0) {
    out.push(min, max);
  }
  return out;
}

export function tickLabel(v: number, log: boolean): string {
  if (log) {
    const e = Math.log10(v);
    if (Math.abs(e - Math.round(e)) < 1e-9) {
      return `1e${Math.round(e)}`;
    }
    return v.toPrecision(2);
  }
  if (v === 0) {
    return "0";
  }
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    return v.toExponential(1);
  }
  return String(Number(v.toPrecision(6)));
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

export function polyline(
  xs: number[],
  ys: number[],
  color: string,
  opts: { width?: number; dash?: string; cssClass?: string } = {},
): string {
  const pts = xs.map((x, i) => `${fmt(x)},${fmt(ys[i]!)}`).join(" ");
  const dash = opts.dash ? ` stroke-dasharray="${opts.dash}"` : "";
  const cls = opts.cssClass ? ` class="${opts.cssClass}"` : "";
  return `<polyline${cls} points="${pts}" fill="none" stroke="${color}" stroke-width="${opts.width ?? 1.5}"${dash}/>`;
}

export function markers(xs: number[], ys: number[], color: string, cssClass: string): string {
  return xs
    .map((x, i) => `<circle class="${cssClass}" cx="${fmt(x)}" cy="${fmt(ys[i]!)}" r="3" fill="${color}"/>`)
    .join("");
}

export function text(
  x: number,
  y: number,
  s: string,
  opts: { size?: number; anchor?: string; rotate?: boolean; color?: string } = {},
): string {
  const rot = opts.rotate ? ` transform="rotate(-90 ${fmt(x)} ${fmt(y)})"` : "";
  return (
    `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${opts.size ?? 11}" ` +
    `font-family="sans-serif" text-anchor="${opts.anchor ?? "middle"}" ` +
    `fill="${opts.color ?? "#222"}"${rot}>${esc(s)}</text>`
  );
}

export interface Frame {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
}

/** Axis frame with ticks and grid lines; y grows downward in SVG. */
export function axes(
  frame: Frame,
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string,
): string {
  const parts: string[] = [];
  parts.push(
    `<rect x="${fmt(frame.x0)}" y="${fmt(frame.y0)}" width="${fmt(frame.x1 - frame.x0)}" ` +
      `height="${fmt(frame.y1 - frame.y0)}" fill="none" stroke="#222"/>`,
  );
  const xTicks = xScale.log
    ? decadeTicks(xScale.min, xScale.max)
    : linearTicks(xScale.min, xScale.max, 6);
  for (const v of xTicks) {
    const px = xScale(v);
    if (px < frame.x0 - 0.5 || px > frame.x1 + 0.5) continue;
    parts.push(
      `<line x1="${fmt(px)}" y1="${fmt(frame.y1)}" x2="${fmt(px)}" y2="${fmt(frame.y1 + 4)}" stroke="#222"/>`,
    );
    parts.push(
      `<line x1="${fmt(px)}" y1="${fmt(frame.y0)}" x2="${fmt(px)}" y2="${fmt(frame.y1)}" stroke="#ddd" stroke-width="0.5"/>`,
    );
    parts.push(text(px, frame.y1 + 16, tickLabel(v, xScale.log)));
  }
  const yTicks = yScale.log
    ? decadeTicks(yScale.min, yScale.max)
    : linearTicks(yScale.min, yScale.max, 6);
  for (const v of yTicks) {
    const py = yScale(v);
    if (py < frame.y0 - 0.5 || py > frame.y1 + 0.5) continue;
    parts.push(
      `<line x1="${fmt(frame.x0 - 4)}" y1="${fmt(py)}" x2="${fmt(frame.x0)}" y2="${fmt(py)}" stroke="#222"/>`,
    );
    parts.push(
      `<line x1="${fmt(frame.x0)}" y1="${fmt(py)}" x2="${fmt(frame.x1)}" y2="${fmt(py)}" stroke="#ddd" stroke-width="0.5"/>`,
    );
    parts.push(text(frame.x0 - 8, py + 4, tickLabel(v, yScale.log), { anchor: "end" }));
  }
  parts.push(text((frame.x0 + frame.x1) / 2, frame.y1 + 34, xLabel));
  parts.push(text(frame.x0 - 52, (frame.y0 + frame.y1) / 2, yLabel, { rotate: true }));
  return parts.join("\n");
}

export function legend(
  entries: Array<{ label: string; color: string; dash?: string }>,
  x: number,
  y: number,
): string {
  const parts: string[] = [];
  entries.forEach((entry, i) => {
    const yy = y + i * 16;
    const dash = entry.dash ? ` stroke-dasharray="${entry.dash}"` : "";
    parts.push(
      `<line x1="${fmt(x)}" y1="${fmt(yy)}" x2="${fmt(x + 22)}" y2="${fmt(yy)}" ` +
        `stroke="${entry.color}" stroke-width="1.5"${dash}/>`,
    );
    parts.push(text(x + 28, yy + 4, entry.label, { anchor: "start" }));
  });
  return parts.join("\n");
}

export function document(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">\n<rect width="100%" height="100%" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}

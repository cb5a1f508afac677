/**
 * Figure renderers for the three harness CSV kinds.
 *
 * Each renderer is a pure function from CSV text to an SVG string, so a
 * re-render of the same inputs is byte-identical.  File I/O lives in the
 * CLI wrapper.
 */

import {
  CostRow,
  CsvError,
  ResultRow,
  TrajectoryRow,
  parseCostCsv,
  parseResultsCsv,
  parseTrajectoryCsv,
} from "./schema.js";
import {
  Frame,
  PALETTE,
  axes,
  document,
  legend,
  makeScale,
  markers,
  polyline,
  text,
} from "./svg.js";

export type FigureKind = "convergence" | "cost_time" | "trajectory";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[]; // CSV file paths, resolved by the caller
  output: string; // image path
  slopes: number[]; // reference slope guides (convergence only)
  title?: string;
}

/** A structurally valid CSV that yields nothing to draw. */
export class EmptySeriesError extends Error {}

const WIDTH = 640;
const HEIGHT = 480;
const FRAME: Frame = { x0: 80, y0: 40, x1: WIDTH - 30, y1: HEIGHT - 60 };

function groupBy<T extends { method: string }>(rows: T[]): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const row of rows) {
    const bucket = out.get(row.method);
    if (bucket === undefined) {
      out.set(row.method, [row]);
    } else {
      bucket.push(row);
    }
  }
  return out;
}

function color(i: number): string {
  return PALETTE[i % PALETTE.length]!;
}

export function renderConvergence(texts: string[], paths: string[], slopes: number[], title?: string): string {
  const rows: ResultRow[] = texts.flatMap((t, i) => parseResultsCsv(t, paths[i] ?? "<input>"));
  const usable = rows.filter((r) => Number.isFinite(r.error_l2) && r.error_l2 > 0 && r.eps > 0);
  const series = groupBy(usable);
  if (series.size === 0) {
    throw new EmptySeriesError(
      `no plottable rows in ${paths.join(", ")}: every row is missing or has a non-positive error`,
    );
  }

  const allEps = usable.map((r) => r.eps);
  const allErr = usable.map((r) => r.error_l2);
  // Slope guides are anchored at the largest-eps point, so extend the
  // y-range to cover each guide's far end before fixing the scale.
  const epsMin = Math.min(...allEps);
  const epsMax = Math.max(...allEps);
  const anchorRow = usable.reduce((a, b) => (b.eps > a.eps ? b : a));
  const guideEnds = slopes.map((p) => anchorRow.error_l2 * Math.pow(epsMin / epsMax, p));
  const yMin = Math.min(...allErr, ...guideEnds);
  const yMax = Math.max(...allErr, ...guideEnds);

  const xS = makeScale(epsMin, epsMax, FRAME.x0 + 15, FRAME.x1 - 15, true);
  const yS = makeScale(yMin / 1.5, yMax * 1.5, FRAME.y1 - 8, FRAME.y0 + 8, true);

  const body: string[] = [axes(FRAME, xS, yS, "eps", "final slow-state error (l2)")];
  const legendEntries: Array<{ label: string; color: string; dash?: string }> = [];
  let idx = 0;
  for (const [method, pts] of series) {
    const sorted = [...pts].sort((a, b) => a.eps - b.eps);
    const xs = sorted.map((r) => xS(r.eps));
    const ys = sorted.map((r) => yS(r.error_l2));
    body.push(polyline(xs, ys, color(idx), { cssClass: "series" }));
    body.push(markers(xs, ys, color(idx), "pt"));
    legendEntries.push({ label: method, color: color(idx) });
    idx += 1;
  }
  for (const p of slopes) {
    const ys = [anchorRow.error_l2, anchorRow.error_l2 * Math.pow(epsMin / epsMax, p)];
    body.push(
      polyline([xS(epsMax), xS(epsMin)], [yS(ys[0]!), yS(ys[1]!)], "#555", {
        width: 1,
        dash: "5,4",
        cssClass: "guide",
      }),
    );
    legendEntries.push({ label: `slope ${p}`, color: "#555", dash: "5,4" });
  }
  body.push(legend(legendEntries, FRAME.x0 + 14, FRAME.y0 + 16));
  body.push(text(WIDTH / 2, 22, title ?? "Modeling error versus eps", { size: 14 }));
  return document(WIDTH, HEIGHT, body.join("\n"));
}

export function renderCostTime(texts: string[], paths: string[], title?: string): string {
  const rows: CostRow[] = texts.flatMap((t, i) => parseCostCsv(t, paths[i] ?? "<input>"));
  if (rows.length === 0) {
    throw new EmptySeriesError(`no cost rows in ${paths.join(", ")}`);
  }
  const series = groupBy(rows);

  const ts = rows.map((r) => r.t);
  const calls = rows.map((r) => r.micro_calls);
  const errs = rows.filter((r) => Number.isFinite(r.error_l2) && r.error_l2 > 0).map((r) => r.error_l2);

  const top: Frame = { x0: 80, y0: 40, x1: WIDTH - 30, y1: 240 };
  const bottom: Frame = { x0: 80, y0: 280, x1: WIDTH - 30, y1: HEIGHT - 60 };
  const xS = makeScale(Math.min(0, ...ts), Math.max(...ts), top.x0, top.x1, false);
  const cS = makeScale(0, Math.max(...calls) * 1.05, top.y1 - 4, top.y0 + 4, false);
  const eS = makeScale(
    errs.length > 0 ? Math.min(...errs) / 1.5 : 1e-12,
    errs.length > 0 ? Math.max(...errs) * 1.5 : 1,
    bottom.y1 - 4,
    bottom.y0 + 4,
    true,
  );

  const body: string[] = [
    axes(top, xS, cS, "", "cumulative micro solves"),
    axes(bottom, xS, eS, "system time t", "error at checkpoint (l2)"),
  ];
  const legendEntries: Array<{ label: string; color: string }> = [];
  let idx = 0;
  for (const [method, pts] of series) {
    const sorted = [...pts].sort((a, b) => a.t - b.t);
    body.push(
      polyline(
        sorted.map((r) => xS(r.t)),
        sorted.map((r) => cS(r.micro_calls)),
        color(idx),
        { cssClass: "series" },
      ),
    );
    const withErr = sorted.filter((r) => Number.isFinite(r.error_l2) && r.error_l2 > 0);
    if (withErr.length > 0) {
      body.push(
        polyline(
          withErr.map((r) => xS(r.t)),
          withErr.map((r) => eS(r.error_l2)),
          color(idx),
          { cssClass: "series-err" },
        ),
      );
      body.push(
        markers(
          withErr.map((r) => xS(r.t)),
          withErr.map((r) => eS(r.error_l2)),
          color(idx),
          "pt",
        ),
      );
    }
    legendEntries.push({ label: method, color: color(idx) });
    idx += 1;
  }
  body.push(legend(legendEntries, top.x0 + 14, top.y0 + 16));
  body.push(text(WIDTH / 2, 22, title ?? "Cost and error versus time", { size: 14 }));
  return document(WIDTH, HEIGHT, body.join("\n"));
}

export function renderTrajectory(texts: string[], paths: string[], title?: string): string {
  const rows: TrajectoryRow[] = texts.flatMap((t, i) => parseTrajectoryCsv(t, paths[i] ?? "<input>"));
  if (rows.length === 0) {
    throw new EmptySeriesError(`no trajectory rows in ${paths.join(", ")}`);
  }
  const series = groupBy(rows);

  const ts = rows.map((r) => r.t);
  const xs1 = rows.map((r) => r.x1);
  const xs2 = rows.map((r) => r.x2);
  const both = xs1.concat(xs2);

  // Left panel: components against time.  Right panel: phase plane.
  const left: Frame = { x0: 70, y0: 40, x1: 385, y1: HEIGHT - 60 };
  const right: Frame = { x0: 445, y0: 40, x1: WIDTH + 140, y1: HEIGHT - 60 };
  const width = WIDTH + 180;

  const tS = makeScale(Math.min(...ts), Math.max(...ts), left.x0, left.x1, false);
  const compS = makeScale(Math.min(...both), Math.max(...both), left.y1 - 6, left.y0 + 6, false);
  const p1S = makeScale(Math.min(...xs1), Math.max(...xs1), right.x0 + 8, right.x1 - 8, false);
  const p2S = makeScale(Math.min(...xs2), Math.max(...xs2), right.y1 - 6, right.y0 + 6, false);

  const body: string[] = [
    axes(left, tS, compS, "t", "slow components"),
    axes(right, p1S, p2S, "x1", "x2"),
  ];
  const legendEntries: Array<{ label: string; color: string; dash?: string }> = [];
  let idx = 0;
  for (const [method, pts] of series) {
    const sorted = [...pts].sort((a, b) => a.t - b.t);
    const c = color(idx);
    body.push(
      polyline(sorted.map((r) => tS(r.t)), sorted.map((r) => compS(r.x1)), c, { cssClass: "series" }),
    );
    body.push(
      polyline(sorted.map((r) => tS(r.t)), sorted.map((r) => compS(r.x2)), c, {
        cssClass: "series",
        dash: "4,3",
        width: 1,
      }),
    );
    body.push(
      polyline(sorted.map((r) => p1S(r.x1)), sorted.map((r) => p2S(r.x2)), c, { cssClass: "phase" }),
    );
    legendEntries.push({ label: `${method} x1`, color: c });
    legendEntries.push({ label: `${method} x2`, color: c, dash: "4,3" });
    idx += 1;
  }
  body.push(legend(legendEntries, left.x0 + 14, left.y0 + 16));
  body.push(text(width / 2, 22, title ?? "Slow trajectory and phase plane", { size: 14 }));
  return document(width, HEIGHT, body.join("\n"));
}

/** Dispatch on figure kind; validates nothing about files (caller reads them). */
export function renderFigure(spec: FigureSpec, texts: string[]): string {
  if (texts.length !== spec.inputs.length) {
    throw new CsvError(`expected ${spec.inputs.length} CSV texts, got ${texts.length}`);
  }
  switch (spec.kind) {
    case "convergence":
      return renderConvergence(texts, spec.inputs, spec.slopes, spec.title);
    case "cost_time":
      return renderCostTime(texts, spec.inputs, spec.title);
    case "trajectory":
      return renderTrajectory(texts, spec.inputs, spec.title);
  }
}

#!/usr/bin/env node
/**
 * Renders harness CSV output into an SVG figure.
 *
 * Usage:
 *   fastslow-plot <convergence|cost_time|trajectory> --in results.csv [--in more.csv]
 *                 --out figure.svg [--slopes 1,2,3] [--title "..."]
 *
 * Exit codes: 0 wrote the figure; 1 inputs rejected (schema mismatch,
 * empty series, unreadable file); 2 usage error.  On a nonzero exit no
 * output file is written.
 */

import { readFileSync, realpathSync, writeFileSync } from "fs";
import { pathToFileURL } from "url";
import { parseArgs } from "util";

import { FigureKind, FigureSpec, renderFigure } from "./figures.js";

const KINDS: readonly FigureKind[] = ["convergence", "cost_time", "trajectory"];

function usage(message: string): number {
  process.stderr.write(
    `error: ${message}\n` +
      "usage: fastslow-plot <convergence|cost_time|trajectory> " +
      "--in <csv> [--in <csv> ...] --out <img> [--slopes 1,2,3] [--title text]\n",
  );
  return 2;
}

export function parseSlopes(raw: string): number[] {
  const parts = raw.split(",").map((s) => s.trim()).filter((s) => s.length > 0);
  const slopes = parts.map(Number);
  if (slopes.length === 0 || slopes.some((v) => !Number.isInteger(v))) {
    throw new Error(`--slopes wants a comma-separated integer list, got "${raw}"`);
  }
  return slopes;
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: "string", multiple: true },
        out: { type: "string" },
        slopes: { type: "string" },
        title: { type: "string" },
      },
    });
  } catch (err) {
    return usage((err as Error).message);
  }

  // Tolerate an explicit leading "plot" so both the installed binary and
  // `node dist/cli.js plot <kind> ...` spellings work.
  const positionals =
    parsed.positionals[0] === "plot" ? parsed.positionals.slice(1) : parsed.positionals;
  const kind = positionals[0];
  if (positionals.length !== 1 || kind === undefined || !KINDS.includes(kind as FigureKind)) {
    return usage(`expected one figure kind out of {${KINDS.join(", ")}}, got "${positionals.join(" ")}"`);
  }
  const inputs = parsed.values.in ?? [];
  if (inputs.length === 0) {
    return usage("at least one --in CSV is required");
  }
  const output = parsed.values.out;
  if (output === undefined) {
    return usage("--out is required");
  }
  let slopes: number[] = [];
  if (parsed.values.slopes !== undefined) {
    try {
      slopes = parseSlopes(parsed.values.slopes);
    } catch (err) {
      return usage((err as Error).message);
    }
  }

  const spec: FigureSpec = {
    kind: kind as FigureKind,
    inputs,
    output,
    slopes,
    title: parsed.values.title,
  };

  let svg: string;
  try {
    const texts = inputs.map((p) => readFileSync(p, "utf-8"));
    svg = renderFigure(spec, texts);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
  writeFileSync(output, svg);
  process.stdout.write(`wrote ${output}\n`);
  return 0;
}

const entry = process.argv[1];
if (entry !== undefined && import.meta.url === pathToFileURL(realpathSync(entry)).href) {
  process.exit(main(process.argv.slice(2)));
}

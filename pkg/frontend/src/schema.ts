/**
 * Row schemas for the benchmark harness CSV outputs.
 *
 * The headers are a contract with the solver package: a file whose header
 * line differs in any way is rejected rather than guessed at.
 */

export const RESULTS_HEADER =
  "eps,method,k,L,P,m,dt,T,error_l2,micro_calls,f_evals,g_evals,wall_ms";
export const COST_HEADER = "t,method,k,L,micro_calls,f_evals,error_l2";
export const TRAJECTORY_HEADER = "t,method,x1,x2";

/** One sweep row: a (method, eps) run with its final error and cost totals. */
export interface ResultRow {
  eps: number;
  method: string;
  k: number;
  L: number;
  P: number;
  m: number;
  dt: number;
  T: number;
  error_l2: number;
  micro_calls: number;
  f_evals: number;
  g_evals: number;
  wall_ms: number;
}

/** One checkpoint row of a cost-versus-time table. */
export interface CostRow {
  t: number;
  method: string;
  k: number;
  L: number;
  micro_calls: number;
  f_evals: number;
  error_l2: number;
}

/** One sampled trajectory point (two slow components). */
export interface TrajectoryRow {
  t: number;
  method: string;
  x1: number;
  x2: number;
}

export class CsvError extends Error {}

function splitLines(text: string): string[] {
  return text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
}

function checkHeader(lines: string[], expected: string, path: string): string[] {
  const header = lines[0];
  if (header === undefined) {
    throw new CsvError(`${path}: file is empty, expected header "${expected}"`);
  }
  if (header !== expected) {
    throw new CsvError(`${path}: header "${header}" does not match the schema "${expected}"`);
  }
  return lines.slice(1);
}

function numberField(raw: string, column: string, path: string, lineNo: number): number {
  if (raw === "nan") {
    return NaN;
  }
  const value = Number(raw);
  if (raw === "" || Number.isNaN(value)) {
    throw new CsvError(`${path}:${lineNo}: column ${column} has non-numeric value "${raw}"`);
  }
  return value;
}

function fields(line: string, want: number, path: string, lineNo: number): string[] {
  const parts = line.split(",");
  if (parts.length !== want) {
    throw new CsvError(`${path}:${lineNo}: expected ${want} columns, got ${parts.length}`);
  }
  return parts;
}

export function parseResultsCsv(text: string, path: string): ResultRow[] {
  const body = checkHeader(splitLines(text), RESULTS_HEADER, path);
  return body.map((line, i) => {
    const p = fields(line, 13, path, i + 2);
    const num = (col: number, name: string) => numberField(p[col]!, name, path, i + 2);
    return {
      eps: num(0, "eps"),
      method: p[1]!,
      k: num(2, "k"),
      L: num(3, "L"),
      P: num(4, "P"),
      m: num(5, "m"),
      dt: num(6, "dt"),
      T: num(7, "T"),
      error_l2: num(8, "error_l2"),
      micro_calls: num(9, "micro_calls"),
      f_evals: num(10, "f_evals"),
      g_evals: num(11, "g_evals"),
      wall_ms: num(12, "wall_ms"),
    };
  });
}

export function parseCostCsv(text: string, path: string): CostRow[] {
  const body = checkHeader(splitLines(text), COST_HEADER, path);
  return body.map((line, i) => {
    const p = fields(line, 7, path, i + 2);
    const num = (col: number, name: string) => numberField(p[col]!, name, path, i + 2);
    return {
      t: num(0, "t"),
      method: p[1]!,
      k: num(2, "k"),
      L: num(3, "L"),
      micro_calls: num(4, "micro_calls"),
      f_evals: num(5, "f_evals"),
      error_l2: num(6, "error_l2"),
    };
  });
}

export function parseTrajectoryCsv(text: string, path: string): TrajectoryRow[] {
  const body = checkHeader(splitLines(text), TRAJECTORY_HEADER, path);
  return body.map((line, i) => {
    const p = fields(line, 4, path, i + 2);
    const num = (col: number, name: string) => numberField(p[col]!, name, path, i + 2);
    return { t: num(0, "t"), method: p[1]!, x1: num(2, "x1"), x2: num(3, "x2") };
  });
}

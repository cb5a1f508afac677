import { describe, expect, it } from "vitest";

import {
  COST_HEADER,
  CsvError,
  RESULTS_HEADER,
  TRAJECTORY_HEADER,
  parseCostCsv,
  parseResultsCsv,
  parseTrajectoryCsv,
} from "../src/schema.js";

const ROW = "0.05,HMM1^1,1,1,4,3,0.01,20.0,1.5e-06,2400,2400,9600,12.5";

describe("results schema", () => {
  it("parses a well-formed file", () => {
    const rows = parseResultsCsv(`${RESULTS_HEADER}\n${ROW}\n`, "r.csv");
    expect(rows).toHaveLength(1);
    const row = rows[0]!;
    expect(row.eps).toBe(0.05);
    expect(row.method).toBe("HMM1^1");
    expect(row.k).toBe(1);
    expect(row.L).toBe(1);
    expect(row.error_l2).toBeCloseTo(1.5e-6, 12);
    expect(row.micro_calls).toBe(2400);
    expect(row.wall_ms).toBe(12.5);
  });

  it("keeps a header-only file as zero rows", () => {
    expect(parseResultsCsv(`${RESULTS_HEADER}\n`, "r.csv")).toEqual([]);
  });

  it("rejects an empty file", () => {
    expect(() => parseResultsCsv("", "r.csv")).toThrow(CsvError);
    expect(() => parseResultsCsv("", "r.csv")).toThrow(/r\.csv.*empty/);
  });

  it("rejects a reordered or renamed header", () => {
    const bad = RESULTS_HEADER.replace("eps,method", "method,eps");
    expect(() => parseResultsCsv(`${bad}\n${ROW}\n`, "r.csv")).toThrow(/does not match the schema/);
  });

  it("rejects a header with an extra column", () => {
    expect(() => parseResultsCsv(`${RESULTS_HEADER},note\n`, "r.csv")).toThrow(CsvError);
  });

  it("carries nan error values through as NaN", () => {
    const nanRow = ROW.replace("1.5e-06", "nan");
    const rows = parseResultsCsv(`${RESULTS_HEADER}\n${nanRow}\n`, "r.csv");
    expect(Number.isNaN(rows[0]!.error_l2)).toBe(true);
  });

  it("rejects non-numeric fields with the line number", () => {
    const bad = ROW.replace("2400", "many");
    expect(() => parseResultsCsv(`${RESULTS_HEADER}\n${bad}\n`, "r.csv")).toThrow(/r\.csv:2/);
  });

  it("rejects rows with the wrong column count", () => {
    expect(() => parseResultsCsv(`${RESULTS_HEADER}\n1,2,3\n`, "r.csv")).toThrow(/expected 13 columns/);
  });
});

describe("cost and trajectory schemas", () => {
  it("parses cost rows", () => {
    const text = `${COST_HEADER}\n2.0,HMM0^1,0,1,804,804,3.2e-05\n`;
    const rows = parseCostCsv(text, "c.csv");
    expect(rows[0]!.t).toBe(2.0);
    expect(rows[0]!.micro_calls).toBe(804);
    expect(rows[0]!.error_l2).toBeCloseTo(3.2e-5, 12);
  });

  it("parses trajectory rows", () => {
    const text = `${TRAJECTORY_HEADER}\n0.5,REF,0.198,-0.021\n`;
    const rows = parseTrajectoryCsv(text, "t.csv");
    expect(rows[0]!.method).toBe("REF");
    expect(rows[0]!.x2).toBeCloseTo(-0.021, 12);
  });

  it("rejects a results header on the cost parser", () => {
    expect(() => parseCostCsv(`${RESULTS_HEADER}\n`, "c.csv")).toThrow(CsvError);
  });
});

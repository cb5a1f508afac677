import { existsSync, mkdtempSync, readFileSync, rmSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { dirname, join } from "path";
import { fileURLToPath } from "url";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { renderConvergence } from "../src/figures.js";

// Captured output of `fastslow sweep --preset desk-fig3`: the linear
// rotation sweep, three corrected methods over four eps values.
const FIXTURE = join(dirname(fileURLToPath(import.meta.url)), "fixtures", "rotation_sweep.csv");

let dir: string;

beforeEach(() => {
  dir = mkdtempSync(join(tmpdir(), "figrot-"));
});

afterEach(() => {
  rmSync(dir, { recursive: true, force: true });
});

describe("rotation sweep figure", () => {
  it("has three series and slope guides 1, 2, 3", () => {
    const text = readFileSync(FIXTURE, "utf-8");
    const svg = renderConvergence([text], [FIXTURE], [1, 2, 3]);
    expect(svg.split('class="series"').length - 1).toBe(3);
    expect(svg.split('class="guide"').length - 1).toBe(3);
    for (const label of ["HMM0^1", "HMM1^1", "HMM2^1", "slope 1", "slope 2", "slope 3"]) {
      expect(svg).toContain(label);
    }
    // Four markers per series.
    expect(svg.split('class="pt"').length - 1).toBe(12);
  });

  it("renders through the command line", () => {
    const out = join(dir, "rotation.svg");
    expect(main(["convergence", "--in", FIXTURE, "--out", out, "--slopes", "1,2,3"])).toBe(0);
    expect(existsSync(out)).toBe(true);
  });

  it("fails with a nonzero exit on an emptied copy and writes nothing", () => {
    const empty = join(dir, "empty.csv");
    const header = readFileSync(FIXTURE, "utf-8").split("\n")[0]!;
    const out = join(dir, "rotation.svg");
    writeFileSync(empty, header + "\n");
    expect(main(["convergence", "--in", empty, "--out", out, "--slopes", "1,2,3"])).not.toBe(0);
    expect(existsSync(out)).toBe(false);
  });
});

import { existsSync, readFileSync } from "fs";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { main, parseArgs } from "../src/cli.js";
import { quantilesCsv, sweepCsv, workDir } from "./fixtures.js";

describe("argument parsing", () => {
  it("parses kind, inputs, out and options", () => {
    const recipe = parseArgs([
      "quantile-fan", "q.csv", "--out", "fig.svg", "--semilog-y",
      "--title", "fan", "--y-min", "0.001", "--y-max", "10",
    ]);
    expect(recipe.kind).toBe("quantile-fan");
    expect(recipe.inputs).toEqual(["q.csv"]);
    expect(recipe.out).toBe("fig.svg");
    expect(recipe.semilogY).toBe(true);
    expect(recipe.yLim).toEqual([0.001, 10]);
  });

  it("rejects unknown kinds and missing out", () => {
    expect(() => parseArgs(["pie", "a.csv", "--out", "x.svg"]))
      .toThrow(/unknown figure kind/);
    expect(() => parseArgs(["tau-sweep", "a.csv"])).toThrow(/--out/);
    expect(() => parseArgs(["tau-sweep", "--out", "x.svg"]))
      .toThrow(/input CSV/);
    expect(() => parseArgs(["tau-sweep", "a.csv", "--out", "x.svg", "--y-min", "1"]))
      .toThrow(/together/);
  });
});

describe("cli", () => {
  it("renders the two Monte Carlo figures twice, byte-identical", () => {
    const dir = workDir();
    const quantiles = quantilesCsv(dir);
    const sweep = sweepCsv(dir);
    for (const [kind, input, name] of [
      ["quantile-fan", quantiles, "fan.svg"],
      ["tau-sweep", sweep, "sweep.svg"],
    ] as const) {
      const out1 = join(dir, `first_${name}`);
      const out2 = join(dir, `second_${name}`);
      expect(main([kind, input, "--out", out1])).toBe(0);
      expect(main([kind, input, "--out", out2])).toBe(0);
      expect(existsSync(out1)).toBe(true);
      expect(readFileSync(out2, "utf8")).toBe(readFileSync(out1, "utf8"));
    }
  });

  it("returns 2 on bad usage", () => {
    expect(main([])).toBe(2);
    expect(main(["quantile-fan", "missing.csv", "--out", "x.svg"])).toBe(2);
  });
});

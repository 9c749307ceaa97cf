import { readFileSync } from "fs";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { loadCsv, numericColumn } from "../src/csv.js";
import { render, plot, FigureRecipe } from "../src/recipe.js";
import { linearScale, logScale, formatTick } from "../src/scale.js";
import { metricsCsv, quantilesCsv, sweepCsv, trajectoryCsv, workDir } from "./fixtures.js";

describe("csv loading", () => {
  it("reads columns and numbers", () => {
    const dir = workDir();
    const table = loadCsv(quantilesCsv(dir));
    expect(table.columns).toEqual(["time", "q00", "q05", "q50", "q95", "q100"]);
    const times = numericColumn(table, "time");
    expect(times[0]).toBe(0);
    expect(times).toHaveLength(21);
  });

  it("reports missing columns by name", () => {
    const dir = workDir();
    const table = loadCsv(sweepCsv(dir));
    expect(() => numericColumn(table, "q50")).toThrow(/missing column "q50"/);
    expect(() => numericColumn(table, "q50")).toThrow(/sweep\.csv/);
  });
});

describe("scales", () => {
  it("linear ticks are nice and inside the domain", () => {
    const s = linearScale(0, 97, 0, 100);
    for (const t of s.ticks()) {
      expect(t).toBeGreaterThanOrEqual(0);
      expect(t).toBeLessThanOrEqual(97);
    }
    expect(s.toPixel(0)).toBe(0);
    expect(s.toPixel(97)).toBe(100);
  });

  it("log ticks are decades", () => {
    const s = logScale(1e-3, 10, 100, 0);
    expect(s.ticks()).toEqual([1e-3, 1e-2, 1e-1, 1, 10]);
  });

  it("tick labels are compact", () => {
    expect(formatTick(0)).toBe("0");
    expect(formatTick(0.25)).toBe("0.25");
    expect(formatTick(1e-6)).toBe("1e-6");
  });
});

describe("figures", () => {
  it("quantile fan renders and is byte-identical across invocations", () => {
    const dir = workDir();
    const input = quantilesCsv(dir);
    const recipe: FigureRecipe = {
      kind: "quantile-fan",
      inputs: [input],
      out: join(dir, "fan.svg"),
    };
    plot(recipe);
    const first = readFileSync(recipe.out, "utf8");
    plot(recipe);
    const second = readFileSync(recipe.out, "utf8");
    expect(second).toBe(first);
    expect(first).toContain("<svg");
    expect(first).toContain("polyline");
  });

  it("quantile fan never mutates its input", () => {
    const dir = workDir();
    const input = quantilesCsv(dir);
    const before = readFileSync(input, "utf8");
    plot({ kind: "quantile-fan", inputs: [input], out: join(dir, "fan.svg") });
    expect(readFileSync(input, "utf8")).toBe(before);
  });

  it("semilog fan uses decade ticks", () => {
    const dir = workDir();
    const svg = render({
      kind: "quantile-fan",
      inputs: [quantilesCsv(dir)],
      out: "unused.svg",
      semilogY: true,
    });
    expect(svg).toContain(">1<");
  });

  it("tau sweep renders deterministically", () => {
    const dir = workDir();
    const input = sweepCsv(dir);
    const a = render({ kind: "tau-sweep", inputs: [input], out: "x.svg" });
    const b = render({ kind: "tau-sweep", inputs: [input], out: "x.svg" });
    expect(a).toBe(b);
    expect(a).toContain("circle");
  });

  it("trajectories renders one line per agent", () => {
    const dir = workDir();
    const svg = render({
      kind: "trajectories",
      inputs: [trajectoryCsv(dir)],
      out: "x.svg",
    });
    const lines = svg.match(/<polyline/g) ?? [];
    expect(lines.length).toBe(4);
  });

  it("comparison renders two panels with a legend per input", () => {
    const dir = workDir();
    const inputs = [
      metricsCsv(dir, "metrics_bc.csv", 1.6),
      metricsCsv(dir, "metrics_nolb.csv", 0.7),
      metricsCsv(dir, "metrics_rnolb.csv", 1.1),
    ];
    const svg = render({ kind: "comparison", inputs, out: "x.svg" });
    expect(svg).toContain(">bc<");
    expect(svg).toContain(">nolb<");
    expect(svg).toContain(">rnolb<");
    expect(svg).toContain("clustering number");
    expect(svg).toContain("variance");
  });

  it("comparison requires at least two inputs", () => {
    const dir = workDir();
    const input = metricsCsv(dir, "metrics_bc.csv", 1.0);
    expect(() => render({ kind: "comparison", inputs: [input], out: "x.svg" }))
      .toThrow(/at least two/);
  });

  it("missing column in input is reported by name", () => {
    const dir = workDir();
    const input = sweepCsv(dir);
    expect(() => render({ kind: "quantile-fan", inputs: [input], out: "x.svg" }))
      .toThrow(/missing column "time"|missing column "q00"/);
  });
});

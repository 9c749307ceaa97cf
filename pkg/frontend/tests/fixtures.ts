import { mkdtempSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";

export function workDir(): string {
  return mkdtempSync(join(tmpdir(), "nolb-plots-"));
}

/** Minimal files conforming to the simulation tool's CSV schemas. */

export function quantilesCsv(dir: string): string {
  const path = join(dir, "quantiles.csv");
  const lines = ["time,q00,q05,q50,q95,q100"];
  for (let k = 0; k <= 20; k += 1) {
    const t = k * 1.0;
    const mid = 9.0 * Math.exp(-0.3 * t);
    lines.push([t, 0.6 * mid, 0.8 * mid, mid, 1.2 * mid, 1.4 * mid]
      .map((v) => v.toPrecision(17)).join(","));
  }
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

export function sweepCsv(dir: string): string {
  const path = join(dir, "sweep.csv");
  const lines = ["rstar,realizations,n_censored,tau_mean,tau_median,tau_q05,tau_q95,tau_min,tau_max"];
  const radii = [0.05, 0.1, 0.2, 0.4, 0.6, 0.8];
  for (const r of radii) {
    const median = 30 + 60 * Math.exp(-8 * r);
    lines.push([r, 30, 0, median + 1, median, median - 8, median + 9,
      median - 12, median + 14].map((v) => String(v)).join(","));
  }
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

export function trajectoryCsv(dir: string): string {
  const path = join(dir, "trajectory.csv");
  const lines = ["time,agent,coord_0"];
  const starts = [1.0, 2.0, 3.0, 4.0];
  for (let k = 0; k <= 10; k += 1) {
    const t = k * 5.0;
    starts.forEach((x0, agent) => {
      const drift = agent === 0 ? 1 : agent === 3 ? -1 : 0;
      const x = x0 + drift * (1 - Math.exp(-t / 10));
      lines.push(`${t},${agent},${x.toPrecision(17)}`);
    });
  }
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

export function metricsCsv(dir: string, name: string, scale: number): string {
  const path = join(dir, name);
  const lines = ["time,diameter,variance,clustering_number,clustering_number_self_inclusive,connected"];
  for (let k = 0; k <= 40; k += 1) {
    const t = k * 0.5;
    const clustering = scale * (1 - Math.exp(-t / 5)) * 10;
    const varc = 8 * Math.exp(-t / (10 * scale));
    lines.push(`${t},${(9 * Math.exp(-t / 30)).toPrecision(17)},${varc.toPrecision(17)},${clustering.toPrecision(17)},${(clustering + 1).toPrecision(17)},1`);
  }
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

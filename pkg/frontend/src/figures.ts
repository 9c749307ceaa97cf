import { basename } from "path";
import { loadCsv, numericColumn, stringColumn, Table } from "./csv.js";
import { linearScale, logScale, Scale } from "./scale.js";
import {
  MARGIN,
  Panel,
  WIDTH,
  band,
  document as svgDocument,
  legend,
  markers,
  panelFrame,
  polyline,
  seriesColor,
} from "./svg.js";

export interface AxisOptions {
  xLabel?: string;
  yLabel?: string;
  xLim?: [number, number];
  yLim?: [number, number];
  semilogY?: boolean;
  title?: string;
}

const PANEL_HEIGHT = 380;

function finiteExtent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === Infinity) {
    throw new Error("no finite values to plot");
  }
  return [lo, hi];
}

function positiveMin(values: number[]): number {
  let lo = Infinity;
  for (const v of values) {
    if (Number.isFinite(v) && v > 0 && v < lo) lo = v;
  }
  return lo === Infinity ? 1e-16 : lo;
}

function makePanel(
  top: number,
  xExtent: [number, number],
  yExtent: [number, number],
  options: AxisOptions,
): Panel {
  const [xLo, xHi] = options.xLim ?? xExtent;
  const x = linearScale(xLo, xHi, MARGIN.left, WIDTH - MARGIN.right);
  const [yLo, yHi] = options.yLim ?? yExtent;
  const y: Scale = options.semilogY
    ? logScale(yLo, yHi, top + PANEL_HEIGHT, top)
    : linearScale(yLo, yHi === yLo ? yHi + 1 : yHi, top + PANEL_HEIGHT, top);
  return { top, height: PANEL_HEIGHT, x, y, yLog: Boolean(options.semilogY) };
}

/** One opinion-coordinate line per agent over time. */
export function trajectoriesFigure(inputs: string[], options: AxisOptions): string {
  const table = loadCsv(inputs[0]);
  const times = numericColumn(table, "time");
  const agents = numericColumn(table, "agent");
  const coords = numericColumn(table, "coord_0");
  const byAgent = new Map<number, { t: number[]; x: number[] }>();
  for (let i = 0; i < times.length; i += 1) {
    let series = byAgent.get(agents[i]);
    if (!series) {
      series = { t: [], x: [] };
      byAgent.set(agents[i], series);
    }
    series.t.push(times[i]);
    series.x.push(coords[i]);
  }
  const panel = makePanel(MARGIN.top, finiteExtent(times), finiteExtent(coords), options);
  const body: string[] = [
    panelFrame(panel, options.xLabel ?? "time", options.yLabel ?? "opinion",
      options.title ?? "agent trajectories"),
  ];
  const ids = [...byAgent.keys()].sort((a, b) => a - b);
  ids.forEach((id, index) => {
    const series = byAgent.get(id)!;
    body.push(polyline(series.t, series.x, panel, seriesColor(index), 1.2));
  });
  return svgDocument(MARGIN.top + PANEL_HEIGHT + MARGIN.bottom, body.join("\n"));
}

/** Diameter quantile fan: outer and inner bands plus the median line. */
export function quantileFanFigure(inputs: string[], options: AxisOptions): string {
  const table = loadCsv(inputs[0]);
  const times = numericColumn(table, "time");
  const q00 = numericColumn(table, "q00");
  const q05 = numericColumn(table, "q05");
  const q50 = numericColumn(table, "q50");
  const q95 = numericColumn(table, "q95");
  const q100 = numericColumn(table, "q100");
  const yExtent: [number, number] = options.semilogY
    ? [positiveMin(q00), finiteExtent(q100)[1]]
    : [0, finiteExtent(q100)[1]];
  const panel = makePanel(MARGIN.top, finiteExtent(times), yExtent, options);
  const body = [
    panelFrame(panel, options.xLabel ?? "time", options.yLabel ?? "diameter",
      options.title ?? "diameter decay, quantile fan"),
    band(times, q00, q100, panel, "#deebf5"),
    band(times, q05, q95, panel, "#aecde8"),
    polyline(times, q50, panel, "#c0392b", 2),
    polyline(times, q00, panel, "#5b84a8", 1),
    polyline(times, q100, panel, "#5b84a8", 1),
    legend([
      ["median", "#c0392b"],
      ["5-95% band", "#aecde8"],
      ["min-max band", "#deebf5"],
    ], panel),
  ];
  return svgDocument(MARGIN.top + PANEL_HEIGHT + MARGIN.bottom, body.join("\n"));
}

/** Median stopping time against the critical-band radius. */
export function tauSweepFigure(inputs: string[], options: AxisOptions): string {
  const table = loadCsv(inputs[0]);
  const rstar = numericColumn(table, "rstar");
  const median = numericColumn(table, "tau_median");
  const q05 = numericColumn(table, "tau_q05");
  const q95 = numericColumn(table, "tau_q95");
  const yExtent = finiteExtent([...q05, ...q95, ...median]);
  const panel = makePanel(MARGIN.top, finiteExtent(rstar),
    [options.semilogY ? positiveMin(q05) : 0, yExtent[1]], options);
  const body = [
    panelFrame(panel, options.xLabel ?? "critical-band radius r*",
      options.yLabel ?? "stopping time",
      options.title ?? "stopping time vs critical-band radius"),
    band(rstar, q05, q95, panel, "#deebf5"),
    polyline(rstar, median, panel, "#c0392b", 2),
    markers(rstar, median, panel, "#c0392b"),
    legend([
      ["median", "#c0392b"],
      ["5-95% band", "#deebf5"],
    ], panel),
  ];
  return svgDocument(MARGIN.top + PANEL_HEIGHT + MARGIN.bottom, body.join("\n"));
}

function seriesLabel(path: string): string {
  const name = basename(path).replace(/\.csv$/, "");
  return name.replace(/^metrics_/, "");
}

/** Clustering-number and variance panels, one series per input file. */
export function comparisonFigure(inputs: string[], options: AxisOptions): string {
  if (inputs.length < 2) {
    throw new Error("comparison needs at least two metrics files");
  }
  const tables: Table[] = inputs.map(loadCsv);
  const labels = inputs.map(seriesLabel);
  const panelHeight = 260;
  const gap = 64;
  const allTimes = tables.flatMap((t) => numericColumn(t, "time"));
  const xExtent = finiteExtent(allTimes);
  const sections: string[] = [];
  const fields: Array<[string, string]> = [
    ["clustering_number", "clustering number"],
    ["variance", "variance"],
  ];
  fields.forEach(([field, label], panelIndex) => {
    const top = MARGIN.top + panelIndex * (panelHeight + gap);
    const values = tables.flatMap((t) => numericColumn(t, field));
    const yExtent: [number, number] = [0, finiteExtent(values)[1]];
    const x = linearScale(options.xLim?.[0] ?? xExtent[0],
      options.xLim?.[1] ?? xExtent[1], MARGIN.left, WIDTH - MARGIN.right);
    const y = linearScale(yExtent[0], yExtent[1] === 0 ? 1 : yExtent[1],
      top + panelHeight, top);
    const panel: Panel = { top, height: panelHeight, x, y, yLog: false };
    sections.push(panelFrame(panel, options.xLabel ?? "time", label,
      panelIndex === 0 ? options.title ?? "model comparison" : ""));
    tables.forEach((t, index) => {
      sections.push(polyline(numericColumn(t, "time"), numericColumn(t, field),
        panel, seriesColor(index), 1.8));
    });
    if (panelIndex === 0) {
      sections.push(legend(labels.map((l, i) => [l, seriesColor(i)]), panel));
    }
  });
  const height = MARGIN.top + 2 * panelHeight + gap + MARGIN.bottom;
  return svgDocument(height, sections.join("\n"));
}

import { formatTick, Scale } from "./scale.js";

export const WIDTH = 760;
export const MARGIN = { left: 64, right: 20, top: 34, bottom: 46 };

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

function px(value: number): string {
  return value.toFixed(2);
}

export interface Panel {
  top: number;
  height: number;
  x: Scale;
  y: Scale;
  yLog: boolean;
}

export function panelFrame(panel: Panel, xLabel: string, yLabel: string, title: string): string {
  const left = MARGIN.left;
  const right = WIDTH - MARGIN.right;
  const top = panel.top;
  const bottom = panel.top + panel.height;
  const parts: string[] = [];
  parts.push(
    `<rect x="${px(left)}" y="${px(top)}" width="${px(right - left)}" height="${px(bottom - top)}" fill="none" stroke="#333333" stroke-width="1"/>`,
  );
  for (const t of panel.x.ticks()) {
    const xp = panel.x.toPixel(t);
    parts.push(`<line x1="${px(xp)}" y1="${px(bottom)}" x2="${px(xp)}" y2="${px(bottom + 4)}" stroke="#333333" stroke-width="1"/>`);
    parts.push(`<text x="${px(xp)}" y="${px(bottom + 17)}" ${FONT} font-size="11" text-anchor="middle" fill="#333333">${formatTick(t)}</text>`);
  }
  for (const t of panel.y.ticks()) {
    const yp = panel.y.toPixel(t);
    parts.push(`<line x1="${px(left - 4)}" y1="${px(yp)}" x2="${px(left)}" y2="${px(yp)}" stroke="#333333" stroke-width="1"/>`);
    parts.push(`<line x1="${px(left)}" y1="${px(yp)}" x2="${px(right)}" y2="${px(yp)}" stroke="#eeeeee" stroke-width="1"/>`);
    parts.push(`<text x="${px(left - 7)}" y="${px(yp + 3.5)}" ${FONT} font-size="11" text-anchor="end" fill="#333333">${formatTick(t)}</text>`);
  }
  if (title) {
    parts.push(`<text x="${px((left + right) / 2)}" y="${px(top - 8)}" ${FONT} font-size="13" text-anchor="middle" fill="#111111">${escapeXml(title)}</text>`);
  }
  if (xLabel) {
    parts.push(`<text x="${px((left + right) / 2)}" y="${px(bottom + 36)}" ${FONT} font-size="12" text-anchor="middle" fill="#111111">${escapeXml(xLabel)}</text>`);
  }
  if (yLabel) {
    const yMid = (top + bottom) / 2;
    parts.push(`<text x="${px(16)}" y="${px(yMid)}" ${FONT} font-size="12" text-anchor="middle" fill="#111111" transform="rotate(-90 ${px(16)} ${px(yMid)})">${escapeXml(yLabel)}</text>`);
  }
  return parts.join("\n");
}

export function polyline(xs: number[], ys: number[], panel: Panel, color: string, width = 1.5): string {
  const points: string[] = [];
  for (let i = 0; i < xs.length; i += 1) {
    if (!Number.isFinite(xs[i]) || !Number.isFinite(ys[i])) continue;
    points.push(`${px(panel.x.toPixel(xs[i]))},${px(panel.y.toPixel(ys[i]))}`);
  }
  return `<polyline points="${points.join(" ")}" fill="none" stroke="${color}" stroke-width="${width}"/>`;
}

export function band(xs: number[], lower: number[], upper: number[], panel: Panel, color: string): string {
  const forward: string[] = [];
  const backward: string[] = [];
  for (let i = 0; i < xs.length; i += 1) {
    if (!Number.isFinite(xs[i])) continue;
    forward.push(`${px(panel.x.toPixel(xs[i]))},${px(panel.y.toPixel(upper[i]))}`);
    backward.push(`${px(panel.x.toPixel(xs[i]))},${px(panel.y.toPixel(lower[i]))}`);
  }
  backward.reverse();
  return `<polygon points="${forward.join(" ")} ${backward.join(" ")}" fill="${color}" stroke="none"/>`;
}

export function markers(xs: number[], ys: number[], panel: Panel, color: string, radius = 3): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i += 1) {
    if (!Number.isFinite(xs[i]) || !Number.isFinite(ys[i])) continue;
    parts.push(`<circle cx="${px(panel.x.toPixel(xs[i]))}" cy="${px(panel.y.toPixel(ys[i]))}" r="${radius}" fill="${color}"/>`);
  }
  return parts.join("\n");
}

export function legend(entries: Array<[string, string]>, panel: Panel): string {
  const parts: string[] = [];
  const x0 = WIDTH - MARGIN.right - 130;
  let y = panel.top + 14;
  for (const [label, color] of entries) {
    parts.push(`<line x1="${px(x0)}" y1="${px(y - 4)}" x2="${px(x0 + 22)}" y2="${px(y - 4)}" stroke="${color}" stroke-width="2.5"/>`);
    parts.push(`<text x="${px(x0 + 28)}" y="${px(y)}" ${FONT} font-size="11" fill="#111111">${escapeXml(label)}</text>`);
    y += 16;
  }
  return parts.join("\n");
}

export function document(height: number, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${height}" viewBox="0 0 ${WIDTH} ${height}">`,
    `<rect x="0" y="0" width="${WIDTH}" height="${height}" fill="#ffffff"/>`,
    body,
    "</svg>",
    "",
  ].join("\n");
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function seriesColor(index: number): string {
  const palette = ["#c0392b", "#2471a3", "#1e8449", "#7d3c98", "#b7950b", "#17a2b8", "#d35400"];
  if (index < palette.length) {
    return palette[index];
  }
  const hue = (index * 47) % 360;
  return `hsl(${hue},55%,40%)`;
}

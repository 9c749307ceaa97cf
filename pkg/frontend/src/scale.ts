export interface Scale {
  toPixel(value: number): number;
  ticks(): number[];
  domain: [number, number];
}

/** Round a raw step to the nearest 1/2/5 decade multiple. */
function niceStep(span: number, targetTicks: number): number {
  const raw = span / Math.max(1, targetTicks);
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  const base = raw / power;
  const factor = base <= 1 ? 1 : base <= 2 ? 2 : base <= 5 ? 5 : 10;
  return factor * power;
}

export function linearScale(
  lo: number,
  hi: number,
  pixelLo: number,
  pixelHi: number,
  targetTicks = 6,
): Scale {
  if (!(hi > lo)) {
    hi = lo + 1;
  }
  const step = niceStep(hi - lo, targetTicks);
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12 * step; t += step) {
    ticks.push(Math.abs(t) < 1e-12 * step ? 0 : t);
  }
  return {
    domain: [lo, hi],
    toPixel: (v) => pixelLo + ((v - lo) / (hi - lo)) * (pixelHi - pixelLo),
    ticks: () => ticks,
  };
}

export function logScale(
  lo: number,
  hi: number,
  pixelLo: number,
  pixelHi: number,
): Scale {
  const safeLo = lo > 0 ? lo : 1e-16;
  const safeHi = hi > safeLo ? hi : safeLo * 10;
  const llo = Math.log10(safeLo);
  const lhi = Math.log10(safeHi);
  const ticks: number[] = [];
  for (let e = Math.ceil(llo); e <= Math.floor(lhi); e += 1) {
    ticks.push(Math.pow(10, e));
  }
  return {
    domain: [safeLo, safeHi],
    toPixel: (v) => {
      const clamped = Math.max(v, safeLo);
      return pixelLo + ((Math.log10(clamped) - llo) / (lhi - llo)) * (pixelHi - pixelLo);
    },
    ticks: () => ticks,
  };
}

export function formatTick(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1e4 || abs < 1e-3) {
    return value.toExponential(0).replace("+", "");
  }
  return Number(value.toPrecision(6)).toString();
}

/**
 * Deterministic SVG chart builder: fixed layout, fixed numeric formatting,
 * no timestamps or generated ids, so identical input yields identical bytes.
 */

export interface Series {
  label: string;
  color: string;
  x: number[];
  y: number[];
  /** one-sigma error bars, drawn at 3 sigma half-height when present */
  yerr?: number[];
  line?: boolean;
  points?: boolean;
  dash?: string;
}

/** Power-law reference drawn through the anchor point on log-log axes. */
export interface SlopeGuide {
  slope: number;
  label: string;
  color: string;
}

export interface ChartSpec {
  title: string;
  subtitle?: string;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  yLog?: boolean;
  series: Series[];
  guides?: SlopeGuide[];
  /** fallback axis ranges for data-free renders */
  defaultX?: [number, number];
  defaultY?: [number, number];
}

const WIDTH = 720;
const HEIGHT = 420;
const MARGIN = { left: 72, right: 24, top: 44, bottom: 56 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

const fmt = (v: number): string => v.toFixed(2);

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function tickLabel(value: number): string {
  const magnitude = Math.abs(value);
  if (value === 0) return "0";
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    const exponent = Math.floor(Math.log10(magnitude));
    const mantissa = value / 10 ** exponent;
    const head = Math.abs(mantissa - 1) < 1e-9 ? "" : `${mantissa.toPrecision(3)}·`;
    return `${head}1e${exponent}`;
  }
  return Number(value.toPrecision(4)).toString();
}

function linearTicks(lo: number, hi: number, count: number): number[] {
  const span = hi - lo || 1;
  const rough = span / count;
  const magnitude = 10 ** Math.floor(Math.log10(rough));
  const step = [1, 2, 5, 10].map((m) => m * magnitude).find((s) => s >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) ticks.push(v);
  return ticks;
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); 10 ** e <= hi * (1 + 1e-9); e += 1) {
    if (10 ** e >= lo * (1 - 1e-9)) ticks.push(10 ** e);
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

interface Scale {
  (value: number): number;
  lo: number;
  hi: number;
  log: boolean;
}

function makeScale(lo: number, hi: number, log: boolean, pixelLo: number, pixelHi: number): Scale {
  const a = log ? Math.log10(lo) : lo;
  const b = log ? Math.log10(hi) : hi;
  const span = b - a || 1;
  const scale = ((value: number): number => {
    const v = log ? Math.log10(value) : value;
    return pixelLo + ((v - a) / span) * (pixelHi - pixelLo);
  }) as Scale;
  scale.lo = lo;
  scale.hi = hi;
  scale.log = log;
  return scale;
}

function dataRange(values: number[], log: boolean, fallback: [number, number]): [number, number] {
  const usable = values.filter((v) => Number.isFinite(v) && (!log || v > 0));
  if (usable.length === 0) return fallback;
  let lo = Math.min(...usable);
  let hi = Math.max(...usable);
  if (lo === hi) {
    lo = log ? lo / 2 : lo - 1;
    hi = log ? hi * 2 : hi + 1;
  }
  if (log) return [lo / 10 ** 0.05, hi * 10 ** 0.05];
  const pad = (hi - lo) * 0.06;
  return [lo === 0 ? 0 : lo - pad, hi + pad];
}

export function renderChart(spec: ChartSpec): string {
  const xs = spec.series.flatMap((s) => s.x);
  const ys = spec.series.flatMap((s,
  ) => (s.yerr ? s.y.flatMap((v, i) => [v - 3 * (s.yerr as number[])[i], v + 3 * (s.yerr as number[])[i]]) : s.y));
  const [xLo, xHi] = dataRange(xs, !!spec.xLog, spec.defaultX ?? [1, 10]);
  const [yLo, yHi] = dataRange(ys, !!spec.yLog, spec.defaultY ?? [0.1, 1]);
  const xScale = makeScale(xLo, xHi, !!spec.xLog, MARGIN.left, MARGIN.left + PLOT_W);
  const yScale = makeScale(yLo, yHi, !!spec.yLog, MARGIN.top + PLOT_H, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${MARGIN.left}" y="22" font-size="15" font-weight="600" fill="#1a1a1a">${esc(spec.title)}</text>`,
  );
  if (spec.subtitle) {
    parts.push(`<text x="${MARGIN.left}" y="38" font-size="11" fill="#777">${esc(spec.subtitle)}</text>`);
  }

  const xTicks = spec.xLog ? decadeTicks(xLo, xHi) : linearTicks(xLo, xHi, 6);
  const yTicks = spec.yLog ? decadeTicks(yLo, yHi) : linearTicks(yLo, yHi, 6);
  for (const tick of yTicks) {
    const y = fmt(yScale(tick));
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + PLOT_W}" y2="${y}" stroke="#e8e8e8" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 6}" y="${fmt(yScale(tick) + 3.5)}" font-size="10" fill="#555" text-anchor="end">${esc(tickLabel(tick))}</text>`,
    );
  }
  for (const tick of xTicks) {
    const x = fmt(xScale(tick));
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${MARGIN.top + PLOT_H}" stroke="#f0f0f0" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${x}" y="${MARGIN.top + PLOT_H + 16}" font-size="10" fill="#555" text-anchor="middle">${esc(tickLabel(tick))}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${PLOT_W}" height="${PLOT_H}" fill="none" stroke="#999" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + PLOT_W / 2}" y="${HEIGHT - 14}" font-size="12" fill="#333" text-anchor="middle">${esc(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${MARGIN.top + PLOT_H / 2}" font-size="12" fill="#333" text-anchor="middle" ` +
      `transform="rotate(-90 18 ${MARGIN.top + PLOT_H / 2})">${esc(spec.yLabel)}</text>`,
  );

  // slope guides: power laws through the last point of the first series with data
  const anchorSeries = spec.series.find((s) => s.x.length > 0);
  for (const guide of spec.guides ?? []) {
    if (!spec.xLog || !spec.yLog) break;
    const [x0, y0] = anchorSeries
      ? [anchorSeries.x[anchorSeries.x.length - 1], anchorSeries.y[anchorSeries.y.length - 1]]
      : [xHi / 10 ** 0.05, Math.sqrt(yLo * yHi)];
    const xStart = xLo * (xHi / xLo) ** 0.08;
    const yStart = y0 * (xStart / x0) ** guide.slope;
    parts.push(
      `<line class="guide" data-slope="${guide.slope}" x1="${fmt(xScale(xStart))}" y1="${fmt(yScale(yStart))}" ` +
        `x2="${fmt(xScale(x0))}" y2="${fmt(yScale(y0))}" stroke="${guide.color}" stroke-width="1" stroke-dasharray="5,4"/>`,
    );
    parts.push(
      `<text x="${fmt(xScale(xStart) + 4)}" y="${fmt(yScale(yStart) - 5)}" font-size="10" fill="${guide.color}">${esc(guide.label)}</text>`,
    );
  }

  spec.series.forEach((series, index) => {
    const clean = series.x
      .map((x, i) => [x, series.y[i], series.yerr ? series.yerr[i] : 0])
      .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y) && (!spec.xLog || x > 0) && (!spec.yLog || y > 0));
    const pixel = clean.map(([x, y, e]) => [xScale(x), yScale(y), e, x, y] as const);
    if (series.line !== false && pixel.length > 1) {
      const points = pixel.map(([px, py]) => `${fmt(px)},${fmt(py)}`).join(" ");
      parts.push(
        `<polyline class="series-${index}" fill="none" stroke="${series.color}" stroke-width="1.6"` +
          (series.dash ? ` stroke-dasharray="${series.dash}"` : "") +
          ` points="${points}"/>`,
      );
    }
    if (series.points) {
      for (const [px, py, err, , y] of pixel) {
        if (series.yerr && err > 0) {
          const upper = yScale(y + 3 * err);
          const lower = yScale(y - 3 * err);
          parts.push(
            `<line x1="${fmt(px)}" y1="${fmt(upper)}" x2="${fmt(px)}" y2="${fmt(lower)}" stroke="${series.color}" stroke-width="1"/>`,
          );
        }
        parts.push(
          `<circle class="point-${index}" cx="${fmt(px)}" cy="${fmt(py)}" r="3" fill="${series.color}"/>`,
        );
      }
    }
  });

  // legend, top-right inside the plot
  let legendY = MARGIN.top + 14;
  for (const series of spec.series) {
    const x = MARGIN.left + PLOT_W - 190;
    parts.push(
      `<line x1="${x}" y1="${legendY - 4}" x2="${x + 22}" y2="${legendY - 4}" stroke="${series.color}" stroke-width="2"` +
        (series.dash ? ` stroke-dasharray="${series.dash}"` : "") +
        `/>`,
    );
    parts.push(`<text x="${x + 28}" y="${legendY}" font-size="11" fill="#333">${esc(series.label)}</text>`);
    legendY += 16;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

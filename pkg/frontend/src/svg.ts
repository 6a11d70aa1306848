/** Minimal SVG line-chart builder (no DOM); supports log or linear axes. */

export type Scale = "linear" | "log";

export interface Series {
  label: string;
  color: string;
  x: number[];
  y: number[];
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: Scale;
  yScale: Scale;
  series: Series[];
  annotations: string[];
  width?: number;
  height?: number;
}

const MARGIN = { top: 48, right: 24, bottom: 56, left: 72 };

function transform(value: number, scale: Scale): number {
  return scale === "log" ? Math.log10(value) : value;
}

function niceTicks(lo: number, hi: number, scale: Scale): number[] {
  if (scale === "log") {
    const ticks: number[] = [];
    for (let e = Math.ceil(lo - 1e-9); e <= Math.floor(hi + 1e-9); e += 1) {
      ticks.push(e);
    }
    if (ticks.length >= 2) return ticks;
    // fewer than two decades: fall back to a few linear ticks in log space
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / 4)));
  const mult = span / step > 8 ? 2 : 1;
  const s = step * mult;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / s) * s; t <= hi + 1e-9; t += s) {
    ticks.push(t);
  }
  return ticks;
}

function fmtTick(t: number, scale: Scale): string {
  if (scale === "log") {
    if (Number.isInteger(t)) return `1e${t}`;
    return Math.pow(10, t).toPrecision(2);
  }
  return Math.abs(t) >= 1000 || (t !== 0 && Math.abs(t) < 0.01)
    ? t.toExponential(1)
    : String(Number(t.toPrecision(4)));
}

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export function renderChart(spec: ChartSpec): string {
  const width = spec.width ?? 720;
  const height = spec.height ?? 480;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs = spec.series.flatMap((s) => s.x).map((v) => transform(v, spec.xScale));
  const ys = spec.series.flatMap((s) => s.y).map((v) => transform(v, spec.yScale));
  const pad = (lo: number, hi: number): [number, number] => {
    const d = hi - lo || 1;
    return [lo - 0.06 * d, hi + 0.06 * d];
  };
  const [x0, x1] = pad(Math.min(...xs), Math.max(...xs));
  const [y0, y1] = pad(Math.min(...ys), Math.max(...ys));
  const sx = (v: number): number =>
    MARGIN.left + ((transform(v, spec.xScale) - x0) / (x1 - x0)) * plotW;
  const sy = (v: number): number =>
    MARGIN.top + plotH - ((transform(v, spec.yScale) - y0) / (y1 - y0)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="13">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    `<text x="${width / 2}" y="24" text-anchor="middle" font-size="16">${esc(spec.title)}</text>`,
  );

  for (const t of niceTicks(x0, x1, spec.xScale)) {
    const px = MARGIN.left + ((t - x0) / (x1 - x0)) * plotW;
    if (px < MARGIN.left - 1 || px > MARGIN.left + plotW + 1) continue;
    parts.push(
      `<line x1="${px}" y1="${MARGIN.top}" x2="${px}" y2="${MARGIN.top + plotH}" stroke="#ddd"/>`,
      `<text x="${px}" y="${MARGIN.top + plotH + 20}" text-anchor="middle">${esc(fmtTick(t, spec.xScale))}</text>`,
    );
  }
  for (const t of niceTicks(y0, y1, spec.yScale)) {
    const py = MARGIN.top + plotH - ((t - y0) / (y1 - y0)) * plotH;
    if (py < MARGIN.top - 1 || py > MARGIN.top + plotH + 1) continue;
    parts.push(
      `<line x1="${MARGIN.left}" y1="${py}" x2="${MARGIN.left + plotW}" y2="${py}" stroke="#ddd"/>`,
      `<text x="${MARGIN.left - 8}" y="${py + 4}" text-anchor="end">${esc(fmtTick(t, spec.yScale))}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333"/>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 12}" text-anchor="middle">${esc(spec.xLabel)}</text>`,
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${esc(spec.yLabel)}</text>`,
  );

  spec.series.forEach((s, i) => {
    const pts = s.x.map((xv, j) => `${sx(xv).toFixed(2)},${sy(s.y[j]).toFixed(2)}`);
    parts.push(
      `<polyline points="${pts.join(" ")}" fill="none" stroke="${s.color}" stroke-width="2"/>`,
    );
    for (const pt of pts) {
      const [px, py] = pt.split(",");
      parts.push(`<circle cx="${px}" cy="${py}" r="3.5" fill="${s.color}"/>`);
    }
    const ly = MARGIN.top + 16 + 18 * i;
    parts.push(
      `<line x1="${MARGIN.left + plotW - 150}" y1="${ly - 4}" x2="${MARGIN.left + plotW - 126}" y2="${ly - 4}" stroke="${s.color}" stroke-width="2"/>`,
      `<text x="${MARGIN.left + plotW - 120}" y="${ly}">${esc(s.label)}</text>`,
    );
  });

  spec.annotations.forEach((a, i) => {
    parts.push(
      `<text x="${MARGIN.left + 10}" y="${MARGIN.top + plotH - 12 - 18 * i}" fill="#333">${esc(a)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}

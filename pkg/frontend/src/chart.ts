/** Minimal deterministic SVG line/scatter chart. No randomness, no dates:
 * identical input yields byte-identical SVG. */

export interface Series {
  label: string;
  points: Array<[number, number]>;
  color: string;
  /** "line" draws a polyline, "points" circles, "both" both. */
  style: "line" | "points" | "both";
  dashed?: boolean;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  /** Render x positions through log10 (sizes spanning decades). */
  logX?: boolean;
}

const W = 640;
const H = 420;
const MARGIN = { left: 70, right: 20, top: 40, bottom: 50 };

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return Number(v.toPrecision(4)).toString();
}

function ticks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / n / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const out: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export function renderChart(spec: ChartSpec): string {
  const xs: number[] = [];
  const ys: number[] = [];
  for (const s of spec.series) {
    for (const [x, y] of s.points) {
      if (Number.isFinite(x) && Number.isFinite(y)) {
        xs.push(spec.logX ? Math.log10(x) : x);
        ys.push(y);
      }
    }
  }
  if (xs.length === 0) {
    throw new Error(`chart '${spec.title}' has no finite points`);
  }
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (xHi === xLo) {
    xLo -= 0.5;
    xHi += 0.5;
  }
  if (yHi === yLo) {
    yLo -= 0.5;
    yHi += 0.5;
  }
  const yPad = 0.05 * (yHi - yLo);
  yLo -= yPad;
  yHi += yPad;

  const plotW = W - MARGIN.left - MARGIN.right;
  const plotH = H - MARGIN.top - MARGIN.bottom;
  const px = (x: number) =>
    MARGIN.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const py = (y: number) =>
    MARGIN.top + plotH - ((y - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" ` +
      `viewBox="0 0 ${W} ${H}" font-family="sans-serif">`,
  );
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(
    `<text x="${W / 2}" y="24" text-anchor="middle" font-size="16">` +
      `${esc(spec.title)}</text>`,
  );

  // axes and ticks
  const axis = `stroke="#333" stroke-width="1"`;
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top + plotH}" ` +
      `x2="${MARGIN.left + plotW}" y2="${MARGIN.top + plotH}" ${axis}/>`,
  );
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" ` +
      `x2="${MARGIN.left}" y2="${MARGIN.top + plotH}" ${axis}/>`,
  );
  for (const t of ticks(xLo, xHi)) {
    const x = px(t);
    const label = spec.logX ? `1e${fmtTick(t)}` : fmtTick(t);
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top + plotH}" x2="${x}" ` +
        `y2="${MARGIN.top + plotH + 5}" ${axis}/>`,
    );
    parts.push(
      `<text x="${x}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" ` +
        `font-size="11">${esc(label)}</text>`,
    );
  }
  for (const t of ticks(yLo, yHi)) {
    const y = py(t);
    parts.push(
      `<line x1="${MARGIN.left - 5}" y1="${y}" x2="${MARGIN.left}" ` +
        `y2="${y}" ${axis}/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${y + 4}" text-anchor="end" ` +
        `font-size="11">${esc(fmtTick(t))}</text>`,
    );
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotW}" ` +
        `y2="${y}" stroke="#ddd" stroke-width="0.5"/>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${H - 12}" ` +
      `text-anchor="middle" font-size="13">${esc(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `font-size="13" transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">` +
      `${esc(spec.yLabel)}</text>`,
  );

  // series
  for (const s of spec.series) {
    const pts = s.points
      .map(([x, y]): [number, number] => [spec.logX ? Math.log10(x) : x, y])
      .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y));
    if (pts.length === 0) continue;
    const dash = s.dashed ? ` stroke-dasharray="6 4"` : "";
    if (s.style !== "points") {
      const d = pts
        .map(([x, y]) => `${px(x).toFixed(2)},${py(y).toFixed(2)}`)
        .join(" ");
      parts.push(
        `<polyline points="${d}" fill="none" stroke="${s.color}" ` +
          `stroke-width="1.5"${dash}/>`,
      );
    }
    if (s.style !== "line") {
      for (const [x, y] of pts) {
        parts.push(
          `<circle cx="${px(x).toFixed(2)}" cy="${py(y).toFixed(2)}" ` +
            `r="2.5" fill="${s.color}"/>`,
        );
      }
    }
  }

  // legend
  let ly = MARGIN.top + 8;
  for (const s of spec.series) {
    const lx = MARGIN.left + plotW - 170;
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" ` +
        `stroke="${s.color}" stroke-width="2"` +
        (s.dashed ? ` stroke-dasharray="6 4"` : "") +
        `/>`,
    );
    parts.push(
      `<text x="${lx + 28}" y="${ly + 4}" font-size="11">` +
        `${esc(s.label)}</text>`,
    );
    ly += 16;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

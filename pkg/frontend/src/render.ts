/** Deterministic SVG renderer for the three-series overlay figure. */

import type { FigureData } from "./csv.js";

export interface RenderOptions {
  title?: string;
}

const WIDTH = 800;
const HEIGHT = 480;
const MARGIN = { top: 40, right: 20, bottom: 56, left: 72 };

const COLORS = {
  exact: "#000000",
  gaussian: "#1f77b4",
  modulated: "#2ca02c",
};

/** Fixed-precision coordinate so output bytes are stable across platforms. */
function px(value: number): string {
  return value.toFixed(2);
}

function tickLabel(value: number): string {
  if (value === 0) return "0";
  if (Number.isInteger(value) && Math.abs(value) < 1e6) return String(value);
  return value.toPrecision(3).replace(/\.?0+$/, "").replace(/\.?0+e/, "e");
}

/** Evenly spaced ticks at a round step covering [lo, hi]. */
function ticks(lo: number, hi: number, count: number): number[] {
  const span = hi - lo;
  const rawStep = span / count;
  const magnitude = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const residual = rawStep / magnitude;
  const step =
    (residual >= 5 ? 5 : residual >= 2 ? 2 : 1) * magnitude;
  const out: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    // snap to the grid to avoid accumulated float drift in labels
    out.push(Math.round(t / step) * step);
  }
  return out;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/**
 * Render the overlay as a standalone SVG document.
 *
 * Exact masses are black dots, the plain Gaussian a blue line, and the
 * modulated prediction open green circles; axes are labeled site /
 * probability mass and a three-entry legend sits in the top-right corner.
 * Output depends only on the input data and options.
 */
export function renderFigure(data: FigureData, options: RenderOptions = {}): string {
  const x0 = Math.min(...data.sites);
  const x1 = Math.max(...data.sites);
  const yPeak = Math.max(...data.exactMass, ...data.gaussian, ...data.modulated);
  const y1 = yPeak * 1.08;

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (x: number) => MARGIN.left + ((x - x0) / (x1 - x0)) * plotW;
  const sy = (y: number) => MARGIN.top + (1 - y / y1) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);

  if (options.title) {
    parts.push(
      `<text x="${px(WIDTH / 2)}" y="24" text-anchor="middle" font-size="16">${escapeXml(options.title)}</text>`,
    );
  }

  // axes frame
  parts.push(
    `<rect x="${px(MARGIN.left)}" y="${px(MARGIN.top)}" width="${px(plotW)}" height="${px(plotH)}" fill="none" stroke="#333333"/>`,
  );

  // x ticks and label
  for (const t of ticks(x0, x1, 8)) {
    const x = px(sx(t));
    parts.push(
      `<line x1="${x}" y1="${px(MARGIN.top + plotH)}" x2="${x}" y2="${px(MARGIN.top + plotH + 5)}" stroke="#333333"/>`,
    );
    parts.push(
      `<text x="${x}" y="${px(MARGIN.top + plotH + 20)}" text-anchor="middle" font-size="12">${tickLabel(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${px(MARGIN.left + plotW / 2)}" y="${px(HEIGHT - 12)}" text-anchor="middle" font-size="14">site</text>`,
  );

  // y ticks and label
  for (const t of ticks(0, y1, 6)) {
    const y = px(sy(t));
    parts.push(
      `<line x1="${px(MARGIN.left - 5)}" y1="${y}" x2="${px(MARGIN.left)}" y2="${y}" stroke="#333333"/>`,
    );
    parts.push(
      `<text x="${px(MARGIN.left - 9)}" y="${y}" text-anchor="end" dominant-baseline="middle" font-size="12">${tickLabel(t)}</text>`,
    );
  }
  parts.push(
    `<text transform="translate(16,${px(MARGIN.top + plotH / 2)}) rotate(-90)" text-anchor="middle" font-size="14">probability mass</text>`,
  );

  // Gaussian line
  const linePoints = data.sites
    .map((k, i) => `${px(sx(k))},${px(sy(data.gaussian[i]))}`)
    .join(" ");
  parts.push(
    `<polyline points="${linePoints}" fill="none" stroke="${COLORS.gaussian}" stroke-width="1.5"/>`,
  );

  // modulated prediction: open circles
  data.sites.forEach((k, i) => {
    parts.push(
      `<circle cx="${px(sx(k))}" cy="${px(sy(data.modulated[i]))}" r="3.5" fill="none" stroke="${COLORS.modulated}" stroke-width="1"/>`,
    );
  });

  // exact mass: filled dots, drawn last so they stay visible
  data.sites.forEach((k, i) => {
    parts.push(
      `<circle cx="${px(sx(k))}" cy="${px(sy(data.exactMass[i]))}" r="2" fill="${COLORS.exact}"/>`,
    );
  });

  // legend, top right
  const lx = MARGIN.left + plotW - 190;
  const ly = MARGIN.top + 12;
  parts.push(
    `<g class="legend" font-size="12">`,
    `<rect x="${px(lx - 8)}" y="${px(ly - 10)}" width="198" height="58" fill="#ffffff" stroke="#cccccc"/>`,
    `<circle cx="${px(lx + 6)}" cy="${px(ly + 2)}" r="2" fill="${COLORS.exact}"/>`,
    `<text x="${px(lx + 18)}" y="${px(ly + 6)}">exact mass</text>`,
    `<line x1="${px(lx)}" y1="${px(ly + 20)}" x2="${px(lx + 12)}" y2="${px(ly + 20)}" stroke="${COLORS.gaussian}" stroke-width="1.5"/>`,
    `<text x="${px(lx + 18)}" y="${px(ly + 24)}">Gaussian</text>`,
    `<circle cx="${px(lx + 6)}" cy="${px(ly + 38)}" r="3.5" fill="none" stroke="${COLORS.modulated}"/>`,
    `<text x="${px(lx + 18)}" y="${px(ly + 42)}">modulated prediction</text>`,
    `</g>`,
  );

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

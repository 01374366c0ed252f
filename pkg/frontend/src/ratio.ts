/**
 * Ratio figure: correlated/uncorrelated fitted leading coefficients versus
 * code distance, with the numeric value printed at each point.
 */

import { AnalyticFitRow } from "./csv.js";

export interface RatioPoint {
  d: number;
  ratio: number;
}

export class RatioError extends Error {}

export function coefficientRatios(rows: AnalyticFitRow[]): RatioPoint[] {
  const byDistance = new Map<number, { unc?: number; cor?: number }>();
  for (const r of rows) {
    const slot = byDistance.get(r.d) ?? {};
    slot[r.curve] = r.coefficient;
    byDistance.set(r.d, slot);
  }
  const out: RatioPoint[] = [];
  for (const [d, slot] of [...byDistance.entries()].sort((a, b) => a[0] - b[0])) {
    if (slot.unc === undefined || slot.cor === undefined) {
      throw new RatioError(`distance ${d} is missing a fitted unc or cor coefficient`);
    }
    out.push({ d, ratio: slot.cor / slot.unc });
  }
  if (out.length === 0) {
    throw new RatioError("no fitted coefficients found");
  }
  return out;
}

export function renderRatioSvg(points: RatioPoint[], title = "correlated / uncorrelated leading coefficient"): string {
  const width = 560;
  const height = 420;
  const left = 70;
  const right = 30;
  const top = 50;
  const bottom = 60;
  const ds = points.map((p) => p.d);
  const dMin = Math.min(...ds) - 1;
  const dMax = Math.max(...ds) + 1;
  const rMax = Math.max(...points.map((p) => p.ratio));
  const logMax = Math.ceil(Math.log10(Math.max(rMax, 10)));
  const px = (d: number) => left + ((d - dMin) / (dMax - dMin)) * (width - left - right);
  const py = (r: number) => height - bottom - (Math.log10(r) / logMax) * (height - top - bottom);
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(`<text x="${width / 2}" y="26" text-anchor="middle" font-size="15">${title}</text>`);
  parts.push(`<rect x="${left}" y="${top}" width="${width - left - right}" height="${height - top - bottom}" fill="none" stroke="black"/>`);
  for (let e = 0; e <= logMax; e++) {
    const y = py(Math.pow(10, e));
    parts.push(`<line x1="${left - 6}" y1="${y}" x2="${left}" y2="${y}" stroke="black"/>`);
    parts.push(`<text x="${left - 10}" y="${y}" text-anchor="end" dominant-baseline="middle" font-size="12">1e${e}</text>`);
  }
  for (const p of points) {
    const x = px(p.d);
    parts.push(`<line x1="${x}" y1="${height - bottom}" x2="${x}" y2="${height - bottom + 6}" stroke="black"/>`);
    parts.push(`<text x="${x}" y="${height - bottom + 22}" text-anchor="middle" font-size="12">${p.d}</text>`);
  }
  const path = points.map((p) => `${px(p.d).toFixed(2)},${py(p.ratio).toFixed(2)}`).join(" ");
  parts.push(`<polyline points="${path}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>`);
  for (const p of points) {
    parts.push(`<circle cx="${px(p.d).toFixed(2)}" cy="${py(p.ratio).toFixed(2)}" r="4" fill="#1f77b4"/>`);
    parts.push(
      `<text x="${px(p.d).toFixed(2)}" y="${(py(p.ratio) - 12).toFixed(2)}" text-anchor="middle" font-size="12" data-point-label="${p.d}">${p.ratio.toPrecision(4)}</text>`,
    );
  }
  parts.push(`<text x="${(left + width - right) / 2}" y="${height - 14}" text-anchor="middle" font-size="14">code distance</text>`);
  parts.push("</svg>");
  return parts.join("\n");
}

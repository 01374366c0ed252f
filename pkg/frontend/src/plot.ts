/**
 * Pseudo-threshold figure builder: log-log logical vs physical infidelity
 * with bootstrap CI bars, dashed slope reference lines through the identity
 * point (1, 1), and a legend in input order.
 *
 * Rendering happens in two stages so tests can assert on data rather than
 * pixels: buildPlotModel() carries the CSV values through untouched, and
 * renderSvg() turns a model into an SVG string.
 */

import { ResultRow } from "./csv.js";

export interface PlotJob {
  inputs: { label: string; rows: ResultRow[] }[];
  referenceSlopes: number[];
  xRange?: [number, number];
  yRange?: [number, number];
  title?: string;
}

export interface SeriesPoint {
  x: number;
  y: number;
  ciLow: number;
  ciHigh: number;
}

export interface Series {
  label: string;
  color: string;
  points: SeriesPoint[];
}

export interface ReferenceLine {
  slope: number;
  /** two endpoints in data coordinates, y = x^slope clipped to the domain */
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface PlotModel {
  series: Series[];
  referenceLines: ReferenceLine[];
  xDomain: [number, number];
  yDomain: [number, number];
  title: string;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

export class PlotJobError extends Error {}

function decadePad(lo: number, hi: number): [number, number] {
  return [Math.pow(10, Math.floor(Math.log10(lo))), Math.pow(10, Math.ceil(Math.log10(hi)))];
}

export function buildPlotModel(job: PlotJob): PlotModel {
  if (job.inputs.length === 0) {
    throw new PlotJobError("at least one input series is required");
  }
  const labels = new Set(job.inputs.map((s) => s.label));
  if (labels.size !== job.inputs.length) {
    throw new PlotJobError("series labels must be unique");
  }
  const series: Series[] = job.inputs.map((inp, i) => ({
    label: inp.label,
    color: PALETTE[i % PALETTE.length],
    points: inp.rows.map((r) => ({
      x: r.physical_infidelity,
      y: r.logical_infidelity,
      ciLow: r.ci_low,
      ciHigh: r.ci_high,
    })),
  }));
  const xs = series.flatMap((s) => s.points.map((p) => p.x)).filter((v) => v > 0);
  const ys = series
    .flatMap((s) => s.points.flatMap((p) => [p.y, p.ciLow, p.ciHigh]))
    .filter((v) => v > 0);
  if (xs.length === 0 || ys.length === 0) {
    throw new PlotJobError("no positive data points to plot on log axes");
  }
  const xDomain = job.xRange ?? decadePad(Math.min(...xs), Math.max(...xs));
  const yDomain = job.yRange ?? decadePad(Math.min(...ys), Math.max(...ys));
  const referenceLines = job.referenceSlopes.map((slope) => {
    // y = x^slope through (1, 1), clipped to the x domain
    const [x0, x1] = xDomain;
    return { slope, x0, y0: Math.pow(x0, slope), x1, y1: Math.pow(x1, slope) };
  });
  return { series, referenceLines, xDomain, yDomain, title: job.title ?? "" };
}

interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

const FRAME: Frame = { width: 720, height: 520, left: 80, right: 200, top: 40, bottom: 60 };

function xPix(f: Frame, dom: [number, number], v: number): number {
  const t = (Math.log10(v) - Math.log10(dom[0])) / (Math.log10(dom[1]) - Math.log10(dom[0]));
  return f.left + t * (f.width - f.left - f.right);
}

function yPix(f: Frame, dom: [number, number], v: number): number {
  const t = (Math.log10(v) - Math.log10(dom[0])) / (Math.log10(dom[1]) - Math.log10(dom[0]));
  return f.height - f.bottom - t * (f.height - f.top - f.bottom);
}

function decadeTicks([lo, hi]: [number, number]): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); e <= Math.floor(Math.log10(hi) + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}

function fmtTick(v: number): string {
  const e = Math.round(Math.log10(v));
  return `1e${e}`;
}

export function renderSvg(model: PlotModel, xLabel = "physical infidelity", yLabel = "logical infidelity"): string {
  const f = FRAME;
  const px = (v: number) => xPix(f, model.xDomain, v).toFixed(2);
  const py = (v: number) => yPix(f, model.yDomain, v).toFixed(2);
  const clampY = (v: number) => Math.min(Math.max(v, model.yDomain[0]), model.yDomain[1]);
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${f.width}" height="${f.height}" viewBox="0 0 ${f.width} ${f.height}">`,
  );
  parts.push(`<rect width="${f.width}" height="${f.height}" fill="white"/>`);
  if (model.title) {
    parts.push(`<text x="${f.width / 2}" y="24" text-anchor="middle" font-size="16">${model.title}</text>`);
  }
  // axes box and decade ticks
  const x0 = f.left, x1 = f.width - f.right, y0 = f.height - f.bottom, y1 = f.top;
  parts.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="black"/>`);
  for (const t of decadeTicks(model.xDomain)) {
    const x = px(t);
    parts.push(`<line x1="${x}" y1="${y0}" x2="${x}" y2="${y0 + 6}" stroke="black"/>`);
    parts.push(`<line x1="${x}" y1="${y1}" x2="${x}" y2="${y0}" stroke="#dddddd" stroke-width="0.5"/>`);
    parts.push(`<text x="${x}" y="${y0 + 20}" text-anchor="middle" font-size="12">${fmtTick(t)}</text>`);
  }
  for (const t of decadeTicks(model.yDomain)) {
    const y = py(t);
    parts.push(`<line x1="${x0 - 6}" y1="${y}" x2="${x0}" y2="${y}" stroke="black"/>`);
    parts.push(`<line x1="${x0}" y1="${y}" x2="${x1}" y2="${y}" stroke="#dddddd" stroke-width="0.5"/>`);
    parts.push(`<text x="${x0 - 10}" y="${y}" text-anchor="end" dominant-baseline="middle" font-size="12">${fmtTick(t)}</text>`);
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${f.height - 16}" text-anchor="middle" font-size="14">${xLabel}</text>`,
  );
  parts.push(
    `<text x="22" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="14" transform="rotate(-90 22 ${(y0 + y1) / 2})">${yLabel}</text>`,
  );
  // dashed slope reference lines
  for (const ref of model.referenceLines) {
    parts.push(
      `<line x1="${px(ref.x0)}" y1="${py(clampY(ref.y0))}" x2="${px(ref.x1)}" y2="${py(clampY(ref.y1))}" ` +
        `stroke="#555555" stroke-dasharray="6,4" data-slope="${ref.slope}"/>`,
    );
  }
  // series: CI bars, markers, connecting lines; legend entries in order
  model.series.forEach((s, i) => {
    const pts = s.points.filter((p) => p.x > 0 && p.y > 0);
    const path = pts.map((p) => `${px(p.x)},${py(p.y)}`).join(" ");
    parts.push(`<g data-series="${s.label}">`);
    for (const p of pts) {
      if (p.ciLow > 0 && p.ciHigh > 0) {
        parts.push(
          `<line x1="${px(p.x)}" y1="${py(clampY(p.ciLow))}" x2="${px(p.x)}" y2="${py(clampY(p.ciHigh))}" stroke="${s.color}" stroke-width="1"/>`,
        );
      }
      parts.push(`<circle cx="${px(p.x)}" cy="${py(p.y)}" r="3" fill="${s.color}"/>`);
    }
    parts.push(`<polyline points="${path}" fill="none" stroke="${s.color}" stroke-width="1.2"/>`);
    const ly = f.top + 14 + 18 * i;
    parts.push(`<line x1="${x1 + 12}" y1="${ly - 4}" x2="${x1 + 34}" y2="${ly - 4}" stroke="${s.color}" stroke-width="2"/>`);
    parts.push(`<text x="${x1 + 40}" y="${ly}" font-size="12" data-legend-index="${i}">${s.label}</text>`);
    parts.push("</g>");
  });
  parts.push("</svg>");
  return parts.join("\n");
}

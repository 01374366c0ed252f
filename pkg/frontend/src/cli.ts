#!/usr/bin/env node
/**
 * heavytail-qec-plot pseudothreshold --input a.csv --label A [--input b.csv --label B ...]
 *                                    [--slopes 1,2] [--xrange lo,hi] [--yrange lo,hi]
 *                                    [--title t] --out fig.svg
 * heavytail-qec-plot pseudothreshold --job job.json
 * heavytail-qec-plot ratio --input fits.csv --out ratio.svg
 */

import * as fs from "node:fs";

import { parseAnalyticFitCsv, parseResultCsv } from "./csv.js";
import { buildPlotModel, PlotJob, renderSvg } from "./plot.js";
import { coefficientRatios, renderRatioSvg } from "./ratio.js";

interface Args {
  command: string;
  inputs: string[];
  labels: string[];
  slopes: number[];
  out?: string;
  job?: string;
  title?: string;
  xrange?: [number, number];
  yrange?: [number, number];
}

function usage(): never {
  console.error("usage: heavytail-qec-plot <pseudothreshold|ratio> --input csv [--label name] ... --out fig.svg");
  process.exit(2);
}

function parsePair(raw: string): [number, number] {
  const parts = raw.split(",").map(Number);
  if (parts.length !== 2 || parts.some((v) => !Number.isFinite(v))) {
    console.error(`expected "lo,hi", got ${raw}`);
    process.exit(2);
  }
  return [parts[0], parts[1]];
}

export function parseArgs(argv: string[]): Args {
  if (argv.length === 0) usage();
  const args: Args = { command: argv[0], inputs: [], labels: [], slopes: [1, 2] };
  for (let i = 1; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--input":
        args.inputs.push(value);
        i++;
        break;
      case "--label":
        args.labels.push(value);
        i++;
        break;
      case "--slopes":
        args.slopes = value.split(",").map(Number);
        i++;
        break;
      case "--out":
        args.out = value;
        i++;
        break;
      case "--job":
        args.job = value;
        i++;
        break;
      case "--title":
        args.title = value;
        i++;
        break;
      case "--xrange":
        args.xrange = parsePair(value);
        i++;
        break;
      case "--yrange":
        args.yrange = parsePair(value);
        i++;
        break;
      default:
        console.error(`unknown flag ${flag}`);
        usage();
    }
  }
  return args;
}

function jobFromArgs(args: Args): { job: PlotJob; out: string } {
  if (args.job) {
    const spec = JSON.parse(fs.readFileSync(args.job, "utf-8"));
    const inputs = (spec.inputs as { path: string; label?: string }[]).map((inp) => ({
      label: inp.label ?? inp.path,
      rows: parseResultCsv(fs.readFileSync(inp.path, "utf-8")),
    }));
    return {
      job: {
        inputs,
        referenceSlopes: spec.reference_slopes ?? [1, 2],
        xRange: spec.x_range,
        yRange: spec.y_range,
        title: spec.title,
      },
      out: spec.output ?? args.out ?? usage(),
    };
  }
  if (args.inputs.length === 0 || !args.out) usage();
  const inputs = args.inputs.map((path, i) => ({
    label: args.labels[i] ?? path,
    rows: parseResultCsv(fs.readFileSync(path, "utf-8")),
  }));
  return {
    job: { inputs, referenceSlopes: args.slopes, xRange: args.xrange, yRange: args.yrange, title: args.title },
    out: args.out,
  };
}

export function main(argv: string[]): void {
  const args = parseArgs(argv);
  if (args.command === "pseudothreshold") {
    const { job, out } = jobFromArgs(args);
    const svg = renderSvg(buildPlotModel(job));
    fs.writeFileSync(out, svg);
    console.log(`wrote ${out}`);
  } else if (args.command === "ratio") {
    if (args.inputs.length !== 1 || !args.out) usage();
    const rows = parseAnalyticFitCsv(fs.readFileSync(args.inputs[0], "utf-8"));
    fs.writeFileSync(args.out, renderRatioSvg(coefficientRatios(rows)));
    console.log(`wrote ${args.out}`);
  } else {
    usage();
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("cli.ts")) {
  try {
    main(process.argv.slice(2));
  } catch (err) {
    console.error(err instanceof Error ? err.message : err);
    process.exit(1);
  }
}

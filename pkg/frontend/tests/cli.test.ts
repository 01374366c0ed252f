import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterAll, describe, expect, it } from "vitest";

import { main, parseArgs } from "../src/cli.js";

const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "htq-plot-"));
afterAll(() => fs.rmSync(tmp, { recursive: true, force: true }));

function writeResultCsv(name: string, scale: number): string {
  const lines = ["sigma,sigma_eff,physical_infidelity,logical_infidelity,ci_low,ci_high,trials"];
  for (const x of [1e-4, 3e-4, 1e-3, 3e-3]) {
    const y = scale * x;
    lines.push(`${x},${x},${x},${y},${y * 0.9},${y * 1.1},10000`);
  }
  const p = path.join(tmp, name);
  fs.writeFileSync(p, lines.join("\n") + "\n");
  return p;
}

describe("cli", () => {
  it("parses flags", () => {
    const args = parseArgs(["pseudothreshold", "--input", "a.csv", "--label", "A", "--slopes", "1,2", "--out", "x.svg"]);
    expect(args.inputs).toEqual(["a.csv"]);
    expect(args.slopes).toEqual([1, 2]);
  });

  it("renders a multi-series pseudo-threshold figure", () => {
    const a = writeResultCsv("a.csv", 2.0);
    const b = writeResultCsv("b.csv", 8.0);
    const out = path.join(tmp, "fig.svg");
    main(["pseudothreshold", "--input", a, "--label", "white", "--input", b, "--label", "dc", "--out", out]);
    const svg = fs.readFileSync(out, "utf-8");
    expect(svg.length).toBeGreaterThan(1000);
    expect(svg).toContain("<svg");
    expect(svg.indexOf('data-series="white"')).toBeLessThan(svg.indexOf('data-series="dc"'));
  });

  it("accepts a JSON job file", () => {
    const a = writeResultCsv("c.csv", 3.0);
    const out = path.join(tmp, "job.svg");
    const job = {
      inputs: [{ path: a, label: "series" }],
      reference_slopes: [1, 2],
      output: out,
      title: "job run",
    };
    const jobPath = path.join(tmp, "job.json");
    fs.writeFileSync(jobPath, JSON.stringify(job));
    main(["pseudothreshold", "--job", jobPath]);
    expect(fs.readFileSync(out, "utf-8")).toContain("job run");
  });

  it("renders the ratio figure from a fit CSV", () => {
    const fit = path.join(tmp, "fit.csv");
    fs.writeFileSync(
      fit,
      "d,curve,exponent,coefficient\n3,unc,4,0.625\n3,cor,4,1.875\n",
    );
    const out = path.join(tmp, "ratio.svg");
    main(["ratio", "--input", fit, "--out", out]);
    expect(fs.readFileSync(out, "utf-8")).toContain("code distance");
  });
});

/**
 * Readers for the two CSV schemas produced by the simulator package.
 * The plotter never recomputes physics; these rows are the single source
 * of truth for everything drawn.
 */

export interface ResultRow {
  sigma: number;
  sigma_eff: number;
  physical_infidelity: number;
  logical_infidelity: number;
  ci_low: number;
  ci_high: number;
  trials: number;
}

export const RESULT_COLUMNS = [
  "sigma",
  "sigma_eff",
  "physical_infidelity",
  "logical_infidelity",
  "ci_low",
  "ci_high",
  "trials",
] as const;

export interface AnalyticFitRow {
  d: number;
  curve: "unc" | "cor";
  exponent: number;
  coefficient: number;
}

export class CsvSchemaError extends Error {}

function splitTable(text: string): { header: string[]; rows: string[][] } {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length < 2) {
    throw new CsvSchemaError("CSV has no data rows");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const rows = lines.slice(1).map((l) => l.split(",").map((c) => c.trim()));
  return { header, rows };
}

function requireColumns(header: string[], needed: readonly string[]): Map<string, number> {
  const index = new Map(header.map((h, i) => [h, i] as const));
  const missing = needed.filter((c) => !index.has(c));
  if (missing.length > 0) {
    throw new CsvSchemaError(`CSV is missing columns: ${missing.join(", ")}`);
  }
  return index;
}

function num(raw: string, column: string): number {
  const v = Number(raw);
  if (!Number.isFinite(v)) {
    throw new CsvSchemaError(`non-numeric value ${JSON.stringify(raw)} in column ${column}`);
  }
  return v;
}

export function parseResultCsv(text: string): ResultRow[] {
  const { header, rows } = splitTable(text);
  const idx = requireColumns(header, RESULT_COLUMNS);
  const out: ResultRow[] = [];
  for (const cells of rows) {
    const row = {
      sigma: num(cells[idx.get("sigma")!], "sigma"),
      sigma_eff: num(cells[idx.get("sigma_eff")!], "sigma_eff"),
      physical_infidelity: num(cells[idx.get("physical_infidelity")!], "physical_infidelity"),
      logical_infidelity: num(cells[idx.get("logical_infidelity")!], "logical_infidelity"),
      ci_low: num(cells[idx.get("ci_low")!], "ci_low"),
      ci_high: num(cells[idx.get("ci_high")!], "ci_high"),
      trials: num(cells[idx.get("trials")!], "trials"),
    };
    if (!(row.ci_low <= row.logical_infidelity && row.logical_infidelity <= row.ci_high)) {
      throw new CsvSchemaError(
        `confidence interval [${row.ci_low}, ${row.ci_high}] does not bracket mean ${row.logical_infidelity}`,
      );
    }
    out.push(row);
  }
  return out;
}

export function parseAnalyticFitCsv(text: string): AnalyticFitRow[] {
  const { header, rows } = splitTable(text);
  const idx = requireColumns(header, ["d", "curve", "exponent", "coefficient"]);
  return rows.map((cells) => {
    const curve = cells[idx.get("curve")!];
    if (curve !== "unc" && curve !== "cor") {
      throw new CsvSchemaError(`unknown curve kind ${JSON.stringify(curve)}`);
    }
    return {
      d: num(cells[idx.get("d")!], "d"),
      curve,
      exponent: num(cells[idx.get("exponent")!], "exponent"),
      coefficient: num(cells[idx.get("coefficient")!], "coefficient"),
    };
  });
}

import fs from "node:fs";
import Papa from "papaparse";

/** One (cell, method) row of a bench summary CSV. */
export interface SummaryRow {
  cell_id: string;
  scenario: string;
  n: number;
  p: number;
  k_true: number;
  snr: number;
  method: string;
  n_replicates: number;
  n_degenerate: number;
  mean_k: number | null;
  mode_k: number | null;
  recovery_rate: number;
  /** Selected-k frequency table (selection -> count). */
  freq: Record<number, number>;
}

export const REQUIRED_COLUMNS = [
  "cell_id",
  "scenario",
  "n",
  "p",
  "k_true",
  "snr",
  "method",
  "n_replicates",
  "n_degenerate",
  "mean_k",
  "mode_k",
  "recovery_rate",
  "freq",
] as const;

export class MissingColumnsError extends Error {
  constructor(readonly missing: string[]) {
    super(`summary CSV is missing required columns: ${missing.join(", ")}`);
  }
}

const INT_COLUMNS = ["n", "p", "k_true", "n_replicates", "n_degenerate"] as const;

/** Read a bench summary CSV, skipping "#" schema-comment lines. */
export function readSummaryCsv(path: string): SummaryRow[] {
  const text = fs
    .readFileSync(path, "utf8")
    .split("\n")
    .filter((line) => !line.startsWith("#"))
    .join("\n");
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`cannot parse ${path}: ${first.message} (row ${first.row})`);
  }
  const columns = parsed.meta.fields ?? [];
  const missing = REQUIRED_COLUMNS.filter((c) => !columns.includes(c));
  if (missing.length > 0) {
    throw new MissingColumnsError(missing);
  }

  return parsed.data.map((raw, index) => {
    const where = `${path} row ${index + 1}`;
    for (const column of INT_COLUMNS) {
      if (!Number.isFinite(Number(raw[column]))) {
        throw new Error(`${where}: column ${column} is not numeric`);
      }
    }
    let freq: Record<number, number>;
    try {
      freq = JSON.parse(raw.freq) as Record<number, number>;
    } catch {
      throw new Error(`${where}: freq column is not valid JSON`);
    }
    return {
      cell_id: raw.cell_id,
      scenario: raw.scenario,
      n: Number(raw.n),
      p: Number(raw.p),
      k_true: Number(raw.k_true),
      snr: Number(raw.snr),
      method: raw.method,
      n_replicates: Number(raw.n_replicates),
      n_degenerate: Number(raw.n_degenerate),
      mean_k: raw.mean_k === "" ? null : Number(raw.mean_k),
      mode_k: raw.mode_k === "" ? null : Number(raw.mode_k),
      recovery_rate: Number(raw.recovery_rate),
      freq,
    };
  });
}

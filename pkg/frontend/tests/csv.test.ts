import fs from "node:fs";
import os from "node:os";
import path from "node:path";
import { describe, expect, it } from "vitest";
import { MissingColumnsError, readSummaryCsv } from "../src/csv.js";

const FIXTURE = path.join(__dirname, "..", "fixtures", "summary_scenario4.csv");

describe("readSummaryCsv", () => {
  it("parses the scenario-4 fixture", () => {
    const rows = readSummaryCsv(FIXTURE);
    expect(rows.length).toBe(24); // 4 p-values x 2 snr x 3 methods
    const first = rows[0];
    expect(first.scenario).toBe("surplus_vars");
    expect(first.k_true).toBe(5);
    expect(typeof first.snr).toBe("number");
    expect(typeof first.mean_k).toBe("number");
  });

  it("frequency tables sum to the non-degenerate replicate count", () => {
    for (const row of readSummaryCsv(FIXTURE)) {
      const total = Object.values(row.freq).reduce((a, b) => a + Number(b), 0);
      expect(total).toBe(row.n_replicates - row.n_degenerate);
    }
  });

  it("skips the schema comment line", () => {
    const text = fs.readFileSync(FIXTURE, "utf8");
    expect(text.startsWith("#")).toBe(true); // precondition for this test
    expect(() => readSummaryCsv(FIXTURE)).not.toThrow();
  });

  it("names every missing column", () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "pesel-plots-"));
    const bad = path.join(dir, "bad.csv");
    fs.writeFileSync(bad, "cell_id,method\nc1,hetero-p\n");
    try {
      readSummaryCsv(bad);
      expect.unreachable("should have thrown");
    } catch (error) {
      expect(error).toBeInstanceOf(MissingColumnsError);
      const missing = (error as MissingColumnsError).missing;
      expect(missing).toContain("snr");
      expect(missing).toContain("freq");
      expect(missing).toContain("mean_k");
    }
  });
});

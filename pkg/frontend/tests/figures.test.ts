import path from "node:path";
import { describe, expect, it } from "vitest";
import { readSummaryCsv } from "../src/csv.js";
import {
  MethodFilterError,
  frequencyGridOption,
  meanEstimateOption,
  resolveMethods,
} from "../src/figures.js";

const FIXTURE = path.join(__dirname, "..", "fixtures", "summary_scenario4.csv");
const rows = readSummaryCsv(FIXTURE);

describe("meanEstimateOption", () => {
  const option = meanEstimateOption(rows, { x: "p", facetBy: "snr" });

  it("facets by snr into two panels", () => {
    expect((option.grid as unknown[]).length).toBe(2);
    expect((option.xAxis as unknown[]).length).toBe(2);
  });

  it("lists every method in the legend", () => {
    const legend = option.legend as { data: string[] };
    expect(legend.data).toEqual([
      "hetero-p",
      "homo-p",
      "variance-threshold:0.9",
    ]);
  });

  it("draws the reference line at the true k in every facet", () => {
    const marks = (option.series as any[])
      .filter((s) => s.markLine)
      .map((s) => s.markLine.data[0].yAxis);
    expect(marks).toEqual([5, 5]);
  });

  it("sizes scatter markers by frequency", () => {
    const scatter = (option.series as any[]).find((s) => s.type === "scatter");
    const sizes = scatter.data.map((d: any) => d.symbolSize);
    expect(Math.max(...sizes)).toBeGreaterThan(Math.min(...sizes));
  });

  it("keeps only filtered methods", () => {
    const filtered = meanEstimateOption(rows, {
      x: "p",
      facetBy: "snr",
      methods: ["hetero-p"],
    });
    const names = new Set((filtered.series as any[]).map((s) => s.name));
    expect(names).toEqual(new Set(["hetero-p"]));
  });
});

describe("frequencyGridOption", () => {
  const option = frequencyGridOption(rows);

  it("creates one panel per (cell, method) row", () => {
    expect((option.grid as unknown[]).length).toBe(24);
    expect((option.series as unknown[]).length).toBe(24);
  });

  it("marks the true k in every panel", () => {
    for (const series of option.series as any[]) {
      expect(series.markLine.data[0].xAxis).toBe(5);
    }
  });

  it("bar heights reproduce the frequency table", () => {
    const first = (option.series as any[])[0];
    const total = first.data.reduce((a: number, [, c]: number[]) => a + c, 0);
    expect(total).toBe(rows[0].n_replicates - rows[0].n_degenerate);
  });
});

describe("resolveMethods", () => {
  it("returns the sorted available set without a filter", () => {
    expect(resolveMethods(rows)).toEqual([
      "hetero-p",
      "homo-p",
      "variance-threshold:0.9",
    ]);
  });

  it("rejects filters that match nothing, listing what exists", () => {
    try {
      resolveMethods(rows, ["laplace-evidence"]);
      expect.unreachable("should have thrown");
    } catch (error) {
      expect(error).toBeInstanceOf(MethodFilterError);
      expect((error as Error).message).toContain("hetero-p");
      expect((error as Error).message).toContain("variance-threshold:0.9");
    }
  });
});

import type { EChartsOption, SeriesOption } from "echarts";
import type { SummaryRow } from "./csv.js";

export type XAxisKey = "snr" | "p";
export type FacetKey = "snr" | "p" | "scenario" | "n";

export interface MeanEstimateSpec {
  x: XAxisKey;
  facetBy: FacetKey;
  methods?: string[];
}

export interface FrequencyGridSpec {
  methods?: string[];
}

export class MethodFilterError extends Error {
  constructor(requested: string[], available: string[]) {
    super(
      `no summary rows match methods [${requested.join(", ")}]; ` +
        `available methods: ${available.join(", ")}`
    );
  }
}

/** Apply the methods filter, failing loudly with the available set. */
export function resolveMethods(rows: SummaryRow[], filter?: string[]): string[] {
  const available = [...new Set(rows.map((r) => r.method))].sort();
  if (!filter || filter.length === 0) {
    return available;
  }
  const chosen = available.filter((m) => filter.includes(m));
  if (chosen.length === 0) {
    throw new MethodFilterError(filter, available);
  }
  return chosen;
}

function facetValues(rows: SummaryRow[], key: FacetKey): Array<string | number> {
  return [...new Set(rows.map((r) => r[key]))].sort((a, b) =>
    typeof a === "number" && typeof b === "number"
      ? a - b
      : String(a).localeCompare(String(b))
  );
}

function symbolSize(count: number, maxCount: number): number {
  return 4 + 18 * Math.sqrt(count / maxCount);
}

/**
 * One line per method of mean selected k against the x key, one facet per
 * value of the facet key. Scatter markers show each observed selection,
 * sized by its frequency; a dashed horizontal line marks the true k.
 */
export function meanEstimateOption(
  rows: SummaryRow[],
  spec: MeanEstimateSpec
): EChartsOption {
  const methods = resolveMethods(rows, spec.methods);
  const kept = rows.filter((r) => methods.includes(r.method));
  const facets = facetValues(kept, spec.facetBy);
  const maxCount = Math.max(
    ...kept.flatMap((r) => Object.values(r.freq).map((c) => Number(c))),
    1
  );

  const grids: EChartsOption["grid"] = [];
  const xAxes: unknown[] = [];
  const yAxes: unknown[] = [];
  const titles: unknown[] = [];
  const series: SeriesOption[] = [];

  const width = 88 / facets.length;
  facets.forEach((facet, fi) => {
    const inFacet = kept.filter((r) => r[spec.facetBy] === facet);
    const left = 7 + fi * width;
    grids.push({ left: `${left}%`, width: `${width - 4}%`, top: 60, bottom: 50 });
    xAxes.push({
      gridIndex: fi,
      type: spec.x === "snr" ? "log" : "value",
      name: spec.x,
      nameLocation: "middle",
      nameGap: 28,
    });
    yAxes.push({
      gridIndex: fi,
      type: "value",
      name: fi === 0 ? "selected components" : "",
    });
    titles.push({
      text: `${spec.facetBy} = ${facet}`,
      left: `${left + (width - 4) / 2}%`,
      top: 26,
      textAlign: "center",
      textStyle: { fontSize: 12 },
    });

    const kTrue = inFacet[0]?.k_true;
    methods.forEach((method, mi) => {
      const cells = inFacet
        .filter((r) => r.method === method && r.mean_k !== null)
        .sort((a, b) => a[spec.x] - b[spec.x]);
      const line: SeriesOption = {
        name: method,
        type: "line",
        xAxisIndex: fi,
        yAxisIndex: fi,
        data: cells.map((r) => [r[spec.x], r.mean_k]),
        symbol: "none",
      };
      if (mi === 0 && kTrue !== undefined) {
        line.markLine = {
          silent: true,
          symbol: "none",
          label: { formatter: `true k = ${kTrue}` },
          lineStyle: { type: "dashed", color: "#555" },
          data: [{ yAxis: kTrue }],
        };
      }
      series.push(line);
      series.push({
        name: method,
        type: "scatter",
        xAxisIndex: fi,
        yAxisIndex: fi,
        data: cells.flatMap((r) =>
          Object.entries(r.freq).map(([k, count]) => ({
            value: [r[spec.x], Number(k)],
            symbolSize: symbolSize(Number(count), maxCount),
          }))
        ),
      });
    });
  });

  return {
    animation: false,
    title: titles as EChartsOption["title"],
    legend: { data: methods, top: 0 },
    grid: grids,
    xAxis: xAxes as EChartsOption["xAxis"],
    yAxis: yAxes as EChartsOption["yAxis"],
    series,
  };
}

/**
 * Faceted selected-k distributions: one bar panel per (cell, method) row of
 * the summary, with a dashed vertical line at the true k.
 */
export function frequencyGridOption(
  rows: SummaryRow[],
  spec: FrequencyGridSpec = {}
): EChartsOption {
  const methods = resolveMethods(rows, spec.methods);
  const panels = rows
    .filter((r) => methods.includes(r.method))
    .sort(
      (a, b) =>
        a.cell_id.localeCompare(b.cell_id) || a.method.localeCompare(b.method)
    );

  const columns = methods.length;
  const panelRows = Math.ceil(panels.length / columns);
  const cellWidth = 92 / columns;
  const cellHeight = 90 / panelRows;

  const grids: EChartsOption["grid"] = [];
  const xAxes: unknown[] = [];
  const yAxes: unknown[] = [];
  const titles: unknown[] = [];
  const series: SeriesOption[] = [];

  panels.forEach((row, i) => {
    const col = i % columns;
    const rowIndex = Math.floor(i / columns);
    const left = 6 + col * cellWidth;
    const top = 6 + rowIndex * cellHeight;
    grids.push({
      left: `${left}%`,
      top: `${top + 2.2}%`,
      width: `${cellWidth - 4}%`,
      height: `${cellHeight - 5}%`,
    });
    xAxes.push({ gridIndex: i, type: "value", minInterval: 1 });
    yAxes.push({ gridIndex: i, type: "value" });
    titles.push({
      text: `${row.cell_id} | ${row.method}`,
      left: `${left}%`,
      top: `${top}%`,
      textStyle: { fontSize: 9 },
    });
    series.push({
      type: "bar",
      xAxisIndex: i,
      yAxisIndex: i,
      barWidth: "60%",
      data: Object.entries(row.freq).map(([k, count]) => [Number(k), count]),
      markLine: {
        silent: true,
        symbol: "none",
        label: { show: false },
        lineStyle: { type: "dashed", color: "#555" },
        data: [{ xAxis: row.k_true }],
      },
    });
  });

  return {
    animation: false,
    title: titles as EChartsOption["title"],
    grid: grids,
    xAxis: xAxes as EChartsOption["xAxis"],
    yAxis: yAxes as EChartsOption["yAxis"],
    series,
  };
}

import * as echarts from "echarts";
import type { EChartsOption } from "echarts";

/** Render an option to an SVG string with echarts server-side rendering. */
export function renderSvg(
  option: EChartsOption,
  width: number,
  height: number
): string {
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}

import { mkdirSync, writeFileSync } from "fs";
import { join } from "path";
import * as echarts from "echarts";
import { readFederation, readPerResource } from "./csv.js";
import { FIGURE_IDS, FigureId, buildOption } from "./figures.js";

export interface RenderResult {
  id: FigureId;
  path: string;
}

function withStableClassNames(svg: string): string {
  // zrender derives css class names and clip-path ids from process-wide
  // counters; renumber by first appearance so renders are byte-identical
  const seen = new Map<string, string>();
  return svg
    .replace(/zr\d+-cls-\d+/g, (name) => {
      if (!seen.has(name)) {
        seen.set(name, `zr-cls-${seen.size}`);
      }
      return seen.get(name)!;
    })
    .replace(/zr\d+-/g, "zr-");
}

export function renderSvg(option: echarts.EChartsOption, width = 800, height = 520): string {
  const chart = echarts.init(null, null, { renderer: "svg", ssr: true, width, height });
  try {
    chart.setOption(option);
    return withStableClassNames(chart.renderToSVGString());
  } finally {
    chart.dispose();
  }
}

export function renderFigures(
  inDir: string,
  outDir: string,
  only?: FigureId[]
): RenderResult[] {
  const ids = only ?? FIGURE_IDS;
  const unknown = ids.filter((id) => !FIGURE_IDS.includes(id));
  if (unknown.length > 0) {
    throw new Error(`unknown figure id(s): ${unknown.join(", ")}`);
  }
  const federation = readFederation(join(inDir, "federation.csv"));
  const perResource = readPerResource(join(inDir, "per_resource.csv"));
  mkdirSync(outDir, { recursive: true });
  return ids.map((id) => {
    const svg = renderSvg(buildOption(id, federation, perResource));
    const path = join(outDir, `${id}.svg`);
    writeFileSync(path, svg);
    return { id, path };
  });
}

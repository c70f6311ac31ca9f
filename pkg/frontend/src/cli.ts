#!/usr/bin/env node
import { FIGURE_IDS, FigureId } from "./figures.js";
import { renderFigures } from "./render.js";

const USAGE = `usage: gridfed-plot --in <dir> --out <dir> [--only id1,id2,...]

Renders sweep figures from federation.csv and per_resource.csv in <dir>.
Figure ids: ${FIGURE_IDS.join(", ")}`;

function parseArgs(argv: string[]) {
  let inDir: string | undefined;
  let outDir: string | undefined;
  let only: FigureId[] | undefined;
  for (let i = 0; i < argv.length; i++) {
    switch (argv[i]) {
      case "--in":
        inDir = argv[++i];
        break;
      case "--out":
        outDir = argv[++i];
        break;
      case "--only":
        only = argv[++i]?.split(",").map((s) => s.trim() as FigureId);
        break;
      case "--help":
      case "-h":
        console.log(USAGE);
        process.exit(0);
        break;
      default:
        throw new Error(`unknown argument: ${argv[i]}\n${USAGE}`);
    }
  }
  if (!inDir || !outDir) {
    throw new Error(`--in and --out are required\n${USAGE}`);
  }
  return { inDir, outDir, only };
}

export function main(argv: string[]): number {
  try {
    const { inDir, outDir, only } = parseArgs(argv);
    const results = renderFigures(inDir, outDir, only);
    for (const r of results) {
      console.log(`wrote ${r.path}`);
    }
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 2;
  }
}

if (process.argv[1] && /cli\.(js|ts)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}

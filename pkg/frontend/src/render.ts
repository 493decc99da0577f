import * as fs from "fs";
import * as path from "path";
import { parseArgs } from "util";

import { renderChart } from "./chart";
import { figureForFile, KNOWN_CSVS } from "./figures";

export interface RenderResult {
  written: string[];
}

export function renderDirectory(
  inDir: string,
  outDir: string,
  format: "png" | "svg",
): RenderResult {
  if (!fs.existsSync(inDir) || !fs.statSync(inDir).isDirectory()) {
    throw new Error(`input directory not found: ${inDir}`);
  }
  const present = fs
    .readdirSync(inDir)
    .filter((f) => f in KNOWN_CSVS)
    .sort();
  if (present.length === 0) {
    throw new Error(
      `no kestenlab CSV artifacts in ${inDir} ` +
        `(expected any of: ${Object.keys(KNOWN_CSVS).sort().join(", ")})`,
    );
  }
  fs.mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  for (const basename of present) {
    const figure = figureForFile(path.join(inDir, basename), basename);
    const svg = renderChart(figure.spec);
    const outPath = path.join(outDir, `${figure.name}.${format}`);
    if (format === "svg") {
      fs.writeFileSync(outPath, svg);
    } else {
      // lazy import: SVG output must work even if the native rasterizer
      // is unavailable on this platform
      const { Resvg } = require("@resvg/resvg-js");
      const png = new Resvg(svg, {
        fitTo: { mode: "width", value: 1280 },
      }).render();
      fs.writeFileSync(outPath, png.asPng());
    }
    written.push(outPath);
  }
  return { written };
}

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: "string" },
        out: { type: "string" },
        format: { type: "string", default: "svg" },
      },
    });
  } catch (e) {
    console.error(`render: ${(e as Error).message}`);
    return 2;
  }
  const command = args.positionals[0];
  if (command !== "render" || !args.values.in || !args.values.out) {
    console.error(
      "usage: render --in <csv-dir> --out <figure-dir> [--format png|svg]",
    );
    return 2;
  }
  const format = args.values.format;
  if (format !== "png" && format !== "svg") {
    console.error(`render: unknown format '${format}' (want png or svg)`);
    return 2;
  }
  try {
    const result = renderDirectory(args.values.in, args.values.out, format);
    for (const f of result.written) {
      console.log(f);
    }
    return 0;
  } catch (e) {
    console.error(`render: ${(e as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}

#!/usr/bin/env node
/** render_figure <figure-id> <csv...> -o <path> */

import { readFileSync, writeFileSync } from "node:fs";
import { render, FIGURE_IDS, SchemaError } from "./figures.js";

export function main(argv: string[]): number {
  const args = [...argv];
  let out = "";
  const oi = args.indexOf("-o");
  if (oi >= 0) {
    out = args[oi + 1] ?? "";
    args.splice(oi, 2);
  }
  const [figureId, ...csvPaths] = args;
  if (!figureId || csvPaths.length === 0 || !out) {
    process.stderr.write(
      `usage: render_figure <${FIGURE_IDS.join("|")}> <csv...> -o <path>\n`);
    return 2;
  }
  try {
    const texts = csvPaths.map((p) => readFileSync(p, "utf-8"));
    const result = render(figureId, texts);
    writeFileSync(out, result.svg, "utf-8");
    process.stdout.write(
      `${out} ${JSON.stringify(result.annotations)}\n`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("render_figure")) {
  process.exit(main(process.argv.slice(2)));
}

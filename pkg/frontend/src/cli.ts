#!/usr/bin/env node
/** plot-figure2: render a figure2 overlay CSV to SVG. */

import { readFileSync, writeFileSync } from "node:fs";
import { parseFigureCsv } from "./csv.js";
import { renderFigure } from "./render.js";

const USAGE = "usage: plot-figure2 --in <csv> --out <svg> [--title <str>]";

export function main(argv: string[]): number {
  let input: string | undefined;
  let output: string | undefined;
  let title: string | undefined;

  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      console.error(`${USAGE}\nmissing value for ${flag}`);
      return 2;
    }
    if (flag === "--in") input = value;
    else if (flag === "--out") output = value;
    else if (flag === "--title") title = value;
    else {
      console.error(`${USAGE}\nunknown flag ${flag}`);
      return 2;
    }
  }
  if (!input || !output) {
    console.error(USAGE);
    return 2;
  }

  let text: string;
  try {
    text = readFileSync(input, "utf-8");
  } catch (err) {
    console.error(`cannot read ${input}: ${(err as Error).message}`);
    return 1;
  }

  try {
    const data = parseFigureCsv(text);
    writeFileSync(output, renderFigure(data, { title }));
  } catch (err) {
    const e = err as Error;
    console.error(`${e.name}: ${e.message}`);
    return 1;
  }
  return 0;
}

import { pathToFileURL } from "node:url";

if (
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href
) {
  process.exitCode = main(process.argv.slice(2));
}

/** Strict parser for the figure2 overlay CSV emitted by the simulation harness. */

import { ParseError, PreconditionError, ValidationError } from "./errors.js";

export const REQUIRED_COLUMNS = [
  "site",
  "exact_mass",
  "gaussian",
  "modulated_prediction",
] as const;

export interface FigureData {
  /** Integer site indices, strictly increasing. */
  sites: number[];
  /** Exact walk probability mass at each site. */
  exactMass: number[];
  /** Plain Gaussian density of matching mean and variance. */
  gaussian: number[];
  /** Site-modulated Gaussian prediction. */
  modulated: number[];
}

function parseNumber(field: string, column: string, line: number): number {
  const value = Number(field);
  if (field.trim() === "" || !Number.isFinite(value)) {
    throw new ParseError(
      `line ${line}: column '${column}' has non-numeric value '${field}'`,
    );
  }
  return value;
}

/**
 * Parse figure CSV text into columns.
 *
 * Requires the exact header `site,exact_mass,gaussian,modulated_prediction`
 * and at least 3 data rows; every drawable window must be nonempty (some
 * series carries positive mass).
 */
export function parseFigureCsv(text: string): FigureData {
  const lines = text.split(/\r?\n/).filter((line) => line.trim() !== "");
  if (lines.length === 0) {
    throw new ParseError("empty input: no header row");
  }
  const header = lines[0].split(",").map((name) => name.trim());
  for (const column of REQUIRED_COLUMNS) {
    if (!header.includes(column)) {
      throw new ParseError(`missing column '${column}'`);
    }
  }
  const index = REQUIRED_COLUMNS.map((column) => header.indexOf(column));

  const rows = lines.slice(1);
  if (rows.length < 3) {
    throw new PreconditionError(
      `need at least 3 data rows, got ${rows.length}`,
    );
  }

  const data: FigureData = { sites: [], exactMass: [], gaussian: [], modulated: [] };
  rows.forEach((row, i) => {
    const fields = row.split(",");
    const line = i + 2; // 1-based, after the header
    if (fields.length < header.length) {
      throw new ParseError(
        `line ${line}: expected ${header.length} fields, got ${fields.length}`,
      );
    }
    data.sites.push(parseNumber(fields[index[0]], "site", line));
    data.exactMass.push(parseNumber(fields[index[1]], "exact_mass", line));
    data.gaussian.push(parseNumber(fields[index[2]], "gaussian", line));
    data.modulated.push(
      parseNumber(fields[index[3]], "modulated_prediction", line),
    );
  });

  const span = Math.max(...data.sites) - Math.min(...data.sites);
  const peak = Math.max(...data.exactMass, ...data.gaussian, ...data.modulated);
  if (span <= 0 || peak <= 0) {
    throw new ValidationError(
      "empty window: site range or mass range has zero extent",
    );
  }
  return data;
}

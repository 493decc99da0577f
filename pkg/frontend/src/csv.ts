import * as fs from "fs";
import Papa from "papaparse";

/** Raised whenever a CSV artifact cannot be used; rendering never guesses. */
export class CsvError extends Error {
  constructor(public readonly file: string, detail: string) {
    super(`${file}: ${detail}`);
    this.name = "CsvError";
  }
}

export interface Table {
  header: string[];
  rows: string[][];
}

export function readCsv(path: string): Table {
  let raw: string;
  try {
    raw = fs.readFileSync(path, "utf-8");
  } catch {
    throw new CsvError(path, "not readable");
  }
  const parsed = Papa.parse<string[]>(raw.trimEnd(), {
    delimiter: ",",
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new CsvError(path, `parse error at row ${e.row}: ${e.message}`);
  }
  const data = parsed.data;
  if (data.length < 2) {
    throw new CsvError(path, "needs a header row and at least one data row");
  }
  const header = data[0];
  const rows = data.slice(1);
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new CsvError(
        path,
        `row has ${row.length} fields, header has ${header.length}`,
      );
    }
  }
  return { header, rows };
}

/** Column by exact name; a renamed or missing column is a loud failure. */
export function column(table: Table, file: string, name: string): string[] {
  const i = table.header.indexOf(name);
  if (i < 0) {
    throw new CsvError(
      file,
      `missing column '${name}' (have: ${table.header.join(", ")})`,
    );
  }
  return table.rows.map((r) => r[i]);
}

/**
 * Numeric column. `-inf` markers are kept as -Infinity so callers can skip
 * them knowingly; anything else non-numeric is an error.
 */
export function numericColumn(
  table: Table,
  file: string,
  name: string,
): number[] {
  return column(table, file, name).map((v) => {
    if (v === "-inf") return -Infinity;
    if (v === "inf") return Infinity;
    const x = Number(v);
    if (v.trim() === "" || Number.isNaN(x)) {
      throw new CsvError(file, `column '${name}' has non-numeric value '${v}'`);
    }
    return x;
  });
}

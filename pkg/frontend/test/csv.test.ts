import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { describe, expect, it } from "vitest";

import { column, CsvError, numericColumn, readCsv } from "../src/csv";

const FIXTURES = path.join(__dirname, "fixtures");

function tempCsv(content: string): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "plots-csv-"));
  const p = path.join(dir, "bad.csv");
  fs.writeFileSync(p, content);
  return p;
}

describe("readCsv", () => {
  it("parses a real artifact", () => {
    const t = readCsv(path.join(FIXTURES, "pressure_series.csv"));
    expect(t.header).toEqual(["n", "normalized_log_partition"]);
    expect(t.rows.length).toBeGreaterThan(0);
  });

  it("fails loudly on a missing file", () => {
    expect(() => readCsv("/nonexistent/nope.csv")).toThrow(CsvError);
  });

  it("fails loudly on a header-only file", () => {
    expect(() => readCsv(tempCsv("n,value\n"))).toThrow(/at least one data/);
  });

  it("fails loudly on ragged rows", () => {
    expect(() => readCsv(tempCsv("n,value\n1,2\n3\n"))).toThrow(
      /1 fields, header has 2/,
    );
  });
});

describe("columns", () => {
  it("reports a missing column with the available names", () => {
    const t = readCsv(path.join(FIXTURES, "pressure_series.csv"));
    expect(() => column(t, "pressure_series.csv", "pressure")).toThrow(
      /missing column 'pressure'.*normalized_log_partition/,
    );
  });

  it("rejects non-numeric values in numeric columns", () => {
    const p = tempCsv("n,value\n1,ok\n");
    const t = readCsv(p);
    expect(() => numericColumn(t, p, "value")).toThrow(/non-numeric/);
  });

  it("keeps -inf markers as -Infinity", () => {
    const p = tempCsv("n,value\n1,-inf\n2,-0.5\n");
    const t = readCsv(p);
    expect(numericColumn(t, p, "value")).toEqual([-Infinity, -0.5]);
  });
});

import * as fs from "fs";
import * as path from "path";
import { describe, expect, it } from "vitest";

import { CsvError } from "../src/csv";
import { figureForFile } from "../src/figures";

const FIXTURES = path.join(__dirname, "fixtures");

/** Pull (row i, columns a/b) straight from the file bytes — the oracle the
 * rendered series must match. */
function rawPoint(file: string, row: number, xCol: number, yCol: number) {
  const lines = fs
    .readFileSync(path.join(FIXTURES, file), "utf-8")
    .trim()
    .split("\n");
  const fields = lines[row].split(",");
  return [Number(fields[xCol]), Number(fields[yCol])] as const;
}

function load(file: string) {
  return figureForFile(path.join(FIXTURES, file), file);
}

describe("spot checks against csv bytes", () => {
  it("pressure series carries the raw values", () => {
    const fig = load("pressure_series.csv");
    const data = fig.spec.series[0].points;
    for (const row of [1, 3, 5]) {
      const [x, y] = rawPoint("pressure_series.csv", row, 0, 1);
      expect(data[row - 1][0]).toBe(x);
      expect(data[row - 1][1]).toBe(y);
    }
  });

  it("spectral radius series carries the raw values", () => {
    const fig = load("spectral_radius.csv");
    const data = fig.spec.series[0].points;
    for (const row of [1, 10, 20]) {
      const [k, rho] = rawPoint("spectral_radius.csv", row, 0, 1);
      expect(data[row - 1]).toEqual([k, rho]);
    }
  });

  it("cogrowth plots count^(1/n) for the raw counts", () => {
    const fig = load("cogrowth.csv");
    const pts = fig.spec.series[0].points;
    // first positive count in the fixture is c_4 = 8
    const [n, c] = rawPoint("cogrowth.csv", 4, 0, 1);
    expect(c).toBe(8);
    expect(pts[0][0]).toBe(n);
    expect(pts[0][1]).toBeCloseTo(Math.pow(8, 1 / 4), 12);
  });
});

describe("figure construction", () => {
  it("return weights drops -inf rows and fits both models", () => {
    const fig = load("return_weights.csv");
    const [data, expFit, polyFit] = fig.spec.series;
    expect(data.points.every(([, y]) => Number.isFinite(y))).toBe(true);
    expect(expFit.label).toMatch(/^exp fit, rate/);
    expect(polyFit.label).toMatch(/^poly fit, power/);
    // the Z-extension fixture decays like n^(-1/2)
    const power = Number(polyFit.label.replace("poly fit, power ", ""));
    expect(power).toBeGreaterThan(0.3);
    expect(power).toBeLessThan(0.7);
  });

  it("folner figure uses a log size axis", () => {
    const fig = load("folner.csv");
    expect(fig.spec.logX).toBe(true);
    expect(fig.spec.series[0].points.length).toBeGreaterThan(0);
  });

  it("rejects unknown artifacts", () => {
    expect(() =>
      figureForFile(path.join(FIXTURES, "pressure_series.csv"), "other.csv"),
    ).toThrow(CsvError);
  });
});

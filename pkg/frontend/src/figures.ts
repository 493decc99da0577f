import { ChartSpec, Series } from "./chart";
import { CsvError, numericColumn, readCsv, Table } from "./csv";

export interface Figure {
  /** output file stem, e.g. "return_weights" */
  name: string;
  spec: ChartSpec;
}

/** Two-column least squares y ~ a + b * f(x); returns [a, b]. */
function fit2(
  xs: number[],
  ys: number[],
  f: (x: number) => number,
): [number, number] {
  const n = xs.length;
  let sf = 0;
  let sff = 0;
  let sy = 0;
  let sfy = 0;
  for (let i = 0; i < n; i++) {
    const v = f(xs[i]);
    sf += v;
    sff += v * v;
    sy += ys[i];
    sfy += v * ys[i];
  }
  const det = n * sff - sf * sf;
  const b = (n * sfy - sf * sy) / det;
  const a = (sy - b * sf) / n;
  return [a, b];
}

function zip(xs: number[], ys: number[]): Array<[number, number]> {
  return xs.map((x, i) => [x, ys[i]]);
}

function finitePairs(
  xs: number[],
  ys: number[],
): { xs: number[]; ys: number[] } {
  const fx: number[] = [];
  const fy: number[] = [];
  for (let i = 0; i < xs.length; i++) {
    if (Number.isFinite(ys[i])) {
      fx.push(xs[i]);
      fy.push(ys[i]);
    }
  }
  return { xs: fx, ys: fy };
}

function pressureFigure(file: string, table: Table): Figure {
  const n = numericColumn(table, file, "n");
  const y = numericColumn(table, file, "normalized_log_partition");
  const last = y[y.length - 1];
  const series: Series[] = [
    { label: "(1/n) log Z_n", points: zip(n, y), color: "#1f77b4", style: "both" },
    {
      label: "final value",
      points: [
        [n[0], last],
        [n[n.length - 1], last],
      ],
      color: "#999999",
      style: "line",
      dashed: true,
    },
  ];
  return {
    name: "pressure",
    spec: {
      title: "Pressure: normalized log partition function",
      xLabel: "word length n",
      yLabel: "(1/n) log Z_n",
      series,
    },
  };
}

function returnWeightsFigure(file: string, table: Table): Figure {
  const n = numericColumn(table, file, "n");
  const y = numericColumn(table, file, "log_return_weight");
  const fin = finitePairs(n, y);
  if (fin.xs.length < 2) {
    throw new CsvError(file, "fewer than 2 finite return weights");
  }
  const [ea, eb] = fit2(fin.xs, fin.ys, (x) => x);
  const [pa, pb] = fit2(fin.xs, fin.ys, Math.log);
  const series: Series[] = [
    {
      label: "log r_n",
      points: zip(fin.xs, fin.ys),
      color: "#1f77b4",
      style: "points",
    },
    {
      label: `exp fit, rate ${(-eb).toFixed(4)}`,
      points: fin.xs.map((x): [number, number] => [x, ea + eb * x]),
      color: "#d62728",
      style: "line",
    },
    {
      label: `poly fit, power ${(-pb).toFixed(3)}`,
      points: fin.xs.map((x): [number, number] => [x, pa + pb * Math.log(x)]),
      color: "#2ca02c",
      style: "line",
      dashed: true,
    },
  ];
  return {
    name: "return_weights",
    spec: {
      title: "Return weights of the group extension",
      xLabel: "n",
      yLabel: "log r_n",
      series,
    },
  };
}

function spectralRadiusFigure(file: string, table: Table): Figure {
  const k = numericColumn(table, file, "k");
  const rho = numericColumn(table, file, "rho_hat");
  return {
    name: "spectral_radius",
    spec: {
      title: "Spectral radius lower bounds",
      xLabel: "k",
      yLabel: "rho_hat_k = u_2k^(1/2k)",
      series: [
        {
          label: "rho_hat_k",
          points: zip(k, rho),
          color: "#1f77b4",
          style: "both",
        },
      ],
    },
  };
}

function cogrowthFigure(file: string, table: Table): Figure {
  const n = numericColumn(table, file, "n");
  const c = numericColumn(table, file, "count");
  const pts: Array<[number, number]> = [];
  for (let i = 0; i < n.length; i++) {
    if (c[i] > 0) pts.push([n[i], Math.pow(c[i], 1 / n[i])]);
  }
  if (pts.length === 0) {
    throw new CsvError(file, "all co-growth counts are zero");
  }
  return {
    name: "cogrowth",
    spec: {
      title: "Co-growth: c_n^(1/n)",
      xLabel: "n",
      yLabel: "c_n^(1/n)",
      series: [
        { label: "c_n^(1/n)", points: pts, color: "#1f77b4", style: "both" },
      ],
    },
  };
}

function folnerFigure(file: string, table: Table): Figure {
  const size = numericColumn(table, file, "size");
  const defect = numericColumn(table, file, "defect");
  return {
    name: "folner",
    spec: {
      title: "Folner search: defect vs candidate size",
      xLabel: "candidate set size",
      yLabel: "defect",
      logX: true,
      series: [
        {
          label: "candidates",
          points: zip(size, defect),
          color: "#1f77b4",
          style: "both",
        },
      ],
    },
  };
}

function symmetryFigure(file: string, table: Table): Figure {
  const n = numericColumn(table, file, "n");
  const d = numericColumn(table, file, "log_defect");
  return {
    name: "symmetry_defects",
    spec: {
      title: "Potential symmetry defects",
      xLabel: "n",
      yLabel: "log D_n",
      series: [
        { label: "log D_n", points: zip(n, d), color: "#1f77b4", style: "both" },
      ],
    },
  };
}

export const KNOWN_CSVS: Record<string, (file: string, t: Table) => Figure> = {
  "pressure_series.csv": pressureFigure,
  "return_weights.csv": returnWeightsFigure,
  "spectral_radius.csv": spectralRadiusFigure,
  "cogrowth.csv": cogrowthFigure,
  "folner.csv": folnerFigure,
  "symmetry_defects.csv": symmetryFigure,
};

export function figureForFile(path: string, basename: string): Figure {
  const builder = KNOWN_CSVS[basename];
  if (!builder) {
    throw new CsvError(path, "not a recognized kestenlab CSV artifact");
  }
  return builder(path, readCsv(path));
}

export { CsvError, readCsv, column, numericColumn } from "./csv";
export { renderChart } from "./chart";
export type { ChartSpec, Series } from "./chart";
export { figureForFile, KNOWN_CSVS } from "./figures";
export type { Figure } from "./figures";
export { renderDirectory, main } from "./render";

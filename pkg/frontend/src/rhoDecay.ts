import { Fits, RHO_SCHEMA, RhoRow, readFits, readSweepCsv } from "./csv.js";
import { renderChart } from "./svg.js";

/** Log-log comparison of the naive vs effectivized band error over rho. */
export function rhoDecaySvg(rows: RhoRow[], fits: Fits): string {
  const annotations: string[] = [];
  if (fits.naive_slope !== undefined) {
    annotations.push(`naive slope: ${fits.naive_slope.toFixed(3)}`);
  }
  if (fits.eff_slope !== undefined) {
    annotations.push(`effectivized slope: ${fits.eff_slope.toFixed(3)}`);
  }
  return renderChart({
    title: "Band error decay: naive vs effectivized",
    xLabel: "rho",
    yLabel: "weighted sup error",
    xScale: "log",
    yScale: "log",
    series: [
      {
        label: "naive",
        color: "#d62728",
        x: rows.map((r) => r.rho),
        y: rows.map((r) => r.naive_err),
      },
      {
        label: "effectivized",
        color: "#1f77b4",
        x: rows.map((r) => r.rho),
        y: rows.map((r) => r.eff_err),
      },
    ],
    annotations,
  });
}

export function buildRhoDecay(csvPath: string): string {
  const rows = readSweepCsv<RhoRow>(csvPath, RHO_SCHEMA);
  return rhoDecaySvg(rows, readFits(csvPath));
}

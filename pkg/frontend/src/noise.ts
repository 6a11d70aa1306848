import { Fits, NOISE_SCHEMA, NoiseRow, readFits, readSweepCsv } from "./csv.js";
import { renderChart } from "./svg.js";

/** Reconstruction error against ln(3 + 1/delta) under the radius schedule. */
export function noiseStabilitySvg(rows: NoiseRow[], fits: Fits): string {
  const finite = rows.filter((r) => Number.isFinite(r.log_term));
  const annotations: string[] = [];
  if (fits.noise_exponent !== undefined) {
    annotations.push(`fitted log-exponent: ${fits.noise_exponent.toFixed(3)}`);
  }
  return renderChart({
    title: "Stability under boundary noise",
    xLabel: "ln(3 + 1/delta)",
    yLabel: "sup-norm reconstruction error",
    xScale: "linear",
    yScale: "log",
    series: [
      {
        label: "error",
        color: "#1f77b4",
        x: finite.map((r) => r.log_term),
        y: finite.map((r) => r.linf_error),
      },
    ],
    annotations,
  });
}

export function buildNoiseStability(csvPath: string): string {
  const rows = readSweepCsv<NoiseRow>(csvPath, NOISE_SCHEMA);
  return noiseStabilitySvg(rows, readFits(csvPath));
}

#!/usr/bin/env node
import { writeFileSync } from "node:fs";
import { buildNoiseStability } from "../noise.js";

const [csv, out] = process.argv.slice(2);
if (!csv || !out) {
  console.error("usage: plot-noise <csv> <out.svg>");
  process.exit(2);
}
try {
  writeFileSync(out, buildNoiseStability(csv));
} catch (err) {
  console.error(String(err instanceof Error ? err.message : err));
  process.exit(1);
}

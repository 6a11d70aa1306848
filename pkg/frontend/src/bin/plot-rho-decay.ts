#!/usr/bin/env node
import { writeFileSync } from "node:fs";
import { buildRhoDecay } from "../rhoDecay.js";

const [csv, out] = process.argv.slice(2);
if (!csv || !out) {
  console.error("usage: plot-rho-decay <csv> <out.svg>");
  process.exit(2);
}
try {
  writeFileSync(out, buildRhoDecay(csv));
} catch (err) {
  console.error(String(err instanceof Error ? err.message : err));
  process.exit(1);
}

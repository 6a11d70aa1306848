import { readFileSync, existsSync } from "node:fs";
import Papa from "papaparse";

export const RHO_SCHEMA = "dbar3d-rho-sweep-v1";
export const NOISE_SCHEMA = "dbar3d-noise-sweep-v1";

export interface RhoRow {
  rho: number;
  band: number;
  naive_err: number;
  eff_err: number;
  masked_fraction: number;
  iterations: number;
  contraction: number;
  flagged: number;
}

export interface NoiseRow {
  delta: number;
  log_term: number;
  rho: number;
  capped: number;
  linf_error: number;
  band_err: number;
  i2_bound: number;
  seed: number;
}

/** Fitted exponents written by the sweep alongside its CSV. */
export interface Fits {
  naive_slope?: number;
  eff_slope?: number;
  noise_exponent?: number;
}

export class SchemaError extends Error {}

/**
 * Reads a sweep CSV: first line must be `# schema=<expected>`, followed by a
 * header row and at least one data row.
 */
export function readSweepCsv<T>(path: string, expected: string): T[] {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/);
  const schemaLine = lines[0] ?? "";
  const m = schemaLine.match(/^#\s*schema=(\S+)\s*$/);
  if (!m) {
    throw new SchemaError(`${path}: missing schema comment line`);
  }
  if (m[1] !== expected) {
    throw new SchemaError(
      `${path}: schema mismatch: got "${m[1]}", expected "${expected}"`,
    );
  }
  const body = lines.slice(1).join("\n");
  const parsed = Papa.parse<T>(body, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`${path}: ${parsed.errors[0].message}`);
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return parsed.data;
}

/**
 * Loads the fitted exponents the sweep wrote next to the CSV (same path with
 * a .json suffix). Annotations are pass-through: absent sidecar means no
 * slope annotations, never a refit.
 */
export function readFits(csvPath: string): Fits {
  const sidecar = csvPath.replace(/\.csv$/, ".json");
  if (!existsSync(sidecar)) {
    return {};
  }
  return JSON.parse(readFileSync(sidecar, "utf8")) as Fits;
}

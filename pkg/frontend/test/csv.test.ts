import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import {
  NOISE_SCHEMA,
  RHO_SCHEMA,
  RhoRow,
  SchemaError,
  readFits,
  readSweepCsv,
} from "../src/csv.js";

const SAMPLES = join(__dirname, "..", "samples");

describe("readSweepCsv", () => {
  it("parses the committed rho sweep sample", () => {
    const rows = readSweepCsv<RhoRow>(
      join(SAMPLES, "rho_sweep.csv"),
      RHO_SCHEMA,
    );
    expect(rows.length).toBe(4);
    expect(rows[0].rho).toBeCloseTo(3.0);
    for (const r of rows) {
      expect(r.naive_err).toBeGreaterThan(0);
      expect(r.eff_err).toBeGreaterThan(0);
    }
  });

  it("parses the committed noise sweep sample", () => {
    const rows = readSweepCsv<Record<string, number>>(
      join(SAMPLES, "noise_sweep.csv"),
      NOISE_SCHEMA,
    );
    expect(rows.length).toBe(5);
    expect(rows[0].delta).toBeCloseTo(0.01);
  });

  it("rejects a schema mismatch", () => {
    expect(() =>
      readSweepCsv(join(SAMPLES, "rho_sweep.csv"), NOISE_SCHEMA),
    ).toThrow(SchemaError);
  });

  it("rejects a missing schema line and an empty CSV", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const noSchema = join(dir, "a.csv");
    writeFileSync(noSchema, "rho,naive_err\n3.0,0.1\n");
    expect(() => readSweepCsv(noSchema, RHO_SCHEMA)).toThrow(SchemaError);

    const empty = join(dir, "b.csv");
    writeFileSync(empty, `# schema=${RHO_SCHEMA}\nrho,naive_err\n`);
    expect(() => readSweepCsv(empty, RHO_SCHEMA)).toThrow(SchemaError);
  });
});

describe("readFits", () => {
  it("reads the sweep's sidecar exponents", () => {
    const fits = readFits(join(SAMPLES, "rho_sweep.csv"));
    expect(fits.naive_slope).toBeTypeOf("number");
    expect(fits.eff_slope).toBeTypeOf("number");
  });

  it("returns empty fits when no sidecar exists", () => {
    expect(readFits("/nonexistent/path.csv")).toEqual({});
  });
});

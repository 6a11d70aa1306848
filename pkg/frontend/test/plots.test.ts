import { mkdtempSync, readFileSync, statSync, existsSync } from "node:fs";
import { execFileSync } from "node:child_process";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { buildNoiseStability } from "../src/noise.js";
import { buildRhoDecay } from "../src/rhoDecay.js";

const ROOT = join(__dirname, "..");
const SAMPLES = join(ROOT, "samples");

function sidecar(name: string): Record<string, number> {
  return JSON.parse(
    readFileSync(join(SAMPLES, name), "utf8"),
  ) as Record<string, number>;
}

describe("figure generation", () => {
  it("renders the rho-decay figure with pass-through slope annotations", () => {
    const svg = buildRhoDecay(join(SAMPLES, "rho_sweep.csv"));
    expect(svg).toContain("<svg");
    expect(svg).toContain("naive");
    expect(svg).toContain("effectivized");
    const fits = sidecar("rho_sweep.json");
    expect(svg).toContain(`naive slope: ${fits.naive_slope.toFixed(3)}`);
    expect(svg).toContain(
      `effectivized slope: ${fits.eff_slope.toFixed(3)}`,
    );
  });

  it("renders the noise-stability figure with the fitted exponent", () => {
    const svg = buildNoiseStability(join(SAMPLES, "noise_sweep.csv"));
    expect(svg).toContain("<svg");
    const fits = sidecar("noise_sweep.json");
    expect(svg).toContain(
      `fitted log-exponent: ${fits.noise_exponent.toFixed(3)}`,
    );
  });
});

describe("command-line scripts", () => {
  const run = (script: string, args: string[]): { status: number } => {
    try {
      execFileSync("node", [join(ROOT, "dist", "bin", script), ...args], {
        stdio: "pipe",
      });
      return { status: 0 };
    } catch (err) {
      return { status: (err as { status: number }).status };
    }
  };

  it("plot-rho-decay writes a nonzero SVG", () => {
    const out = join(mkdtempSync(join(tmpdir(), "plots-")), "rho.svg");
    const res = run("plot-rho-decay.js", [
      join(SAMPLES, "rho_sweep.csv"),
      out,
    ]);
    expect(res.status).toBe(0);
    expect(statSync(out).size).toBeGreaterThan(0);
  });

  it("plot-noise writes a nonzero SVG", () => {
    const out = join(mkdtempSync(join(tmpdir(), "plots-")), "noise.svg");
    const res = run("plot-noise.js", [join(SAMPLES, "noise_sweep.csv"), out]);
    expect(res.status).toBe(0);
    expect(statSync(out).size).toBeGreaterThan(0);
  });

  it("fails on schema mismatch without writing a file", () => {
    const out = join(mkdtempSync(join(tmpdir(), "plots-")), "bad.svg");
    const res = run("plot-rho-decay.js", [
      join(SAMPLES, "noise_sweep.csv"),
      out,
    ]);
    expect(res.status).toBe(1);
    expect(existsSync(out)).toBe(false);
  });
});

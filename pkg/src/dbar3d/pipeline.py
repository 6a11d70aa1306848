"""Experiment orchestration: end-to-end reconstruction runs, resolution-decay
sweeps over the ring radius rho, and noise-stability sweeps over the boundary
perturbation delta.

Every sweep emits CSV rows under a fixed, versioned schema plus a JSON report
with fitted exponents; field-valued artifacts go to binary containers.  All
randomness flows through per-row seeds derived from the config seed, so reruns
are byte-identical.
"""

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .boundary import h_on_slice, scattering_slice_direct
from .containers import save_container
from .coords import build_lambda_grid
from .dbar import (cauchy_H0, extract_vhat, field_from_slice, naive_vhat,
                   solve_H)
from .forward import NoiseModel, dtn_radial, dtn_zero, opnorm, perturb
from .fourier import error_report, fourier_direct, invert_bandlimited
from .grids import Potential, make_volume_grid
from .norms import weighted_sup_values
from .potentials import (gaussian_profile, poly_bump_profile,
                         smooth_bump_profile)
from .sphere import make_boundary_quadrature

CSV_SCHEMA_RHO = "dbar3d-rho-sweep-v1"
CSV_SCHEMA_NOISE = "dbar3d-noise-sweep-v1"

RHO_FIELDS = ["rho", "band", "naive_err", "eff_err", "masked_fraction",
              "iterations", "contraction", "flagged"]
NOISE_FIELDS = ["delta", "log_term", "rho", "capped", "linf_error",
                "band_err", "i2_bound", "seed"]


@dataclass
class ExperimentConfig:
    """All knobs of one experiment family; JSON-serializable."""

    profile: str = "smooth"          # smooth | poly | gaussian
    amplitude: float = 8.0
    support_radius: float = 0.9
    power: int = 4                   # poly profile smoothness order
    width: float = 0.25              # gaussian profile width
    m: int = 6                       # smoothness label carried into reports

    n_volume: int = 40
    half_width: float = 2.0

    tau: float = 0.45
    nu: tuple = (0.0, 0.0, 1.0)
    n_p: int = 4
    n_radial: int = 6
    n_angular: int = 64
    log_span: float = 4.0
    n_phi: int = 16

    route: str = "direct"            # direct | dtn
    harmonic_degree: int = 8         # DtN route: spherical-harmonic cutoff

    rho_list: tuple = (3.0, 4.5, 6.0, 9.0)

    deltas: tuple = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)
    noise_kind: str = "gaussian-entrywise"
    beta: float = 0.6                # rho(delta) = beta * ln(3 + 1/delta)
    rho_cap: float = 5.0

    seed: int = 0
    out_dir: str = "runs"

    def volume_grid(self):
        return make_volume_grid(self.n_volume, self.half_width)

    def potential(self):
        g = self.volume_grid()
        if self.profile == "smooth":
            prof, m = smooth_bump_profile(self.amplitude, self.support_radius), self.m
        elif self.profile == "poly":
            prof, m = poly_bump_profile(self.amplitude, self.support_radius,
                                        self.power), self.power
        elif self.profile == "gaussian":
            prof, m = gaussian_profile(self.amplitude, self.width,
                                       self.support_radius), self.m
        elif self.profile == "zero":
            return Potential(g, np.zeros((g.n_per_axis,) * 3), m=self.m)
        else:
            raise ValueError(f"unknown profile {self.profile!r}")
        return Potential.from_radial(g, prof, m=m)

    def lambda_grid(self, rho):
        return build_lambda_grid(rho, self.tau, np.asarray(self.nu, float),
                                 n_p=self.n_p, n_radial=self.n_radial,
                                 n_angular=self.n_angular,
                                 log_span=self.log_span)

    def to_json(self, path):
        Path(path).write_text(
            json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n")

    @classmethod
    def from_json(cls, path):
        data = json.loads(Path(path).read_text())
        for key in ("nu", "rho_list", "deltas"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)


def true_band_values(v, p_nodes):
    """v-hat at scattered p nodes by the exact phase sum over the volume grid
    (the dual-grid transform interpolates too coarsely for error studies)."""
    x, y, z = v.grid.mesh()
    xs = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=-1)
    phases = np.exp(1j * (xs @ np.asarray(p_nodes, float).T))
    return (v.values.ravel() @ phases) * v.grid.cell_volume / (2.0 * np.pi) ** 3


def ring_slice(config, v, rho, noise=None):
    """Ring scattering data for one rho, by the configured route.

    The direct route evaluates the scattering transform from the potential;
    the dtn route goes through boundary maps (optionally perturbed by the
    seeded NoiseModel `noise`), which is the measured-data path.
    """
    lgrid = config.lambda_grid(rho)
    if config.route == "direct":
        if noise is not None:
            raise ValueError("noise perturbs boundary maps; use route='dtn'")
        return scattering_slice_direct(v, lgrid)
    L = config.harmonic_degree
    phi_v = dtn_radial(v, L) if v.radial_profile is not None else None
    if phi_v is None:
        from .forward import dtn_general
        phi_v = dtn_general(v, L)
    phi_0 = dtn_zero(L)
    if noise is not None:
        phi_v = perturb(phi_v, noise)
    quad = make_boundary_quadrature(L)
    return h_on_slice(phi_v, phi_0, lgrid, quad, v.grid)


def reconstruct_slice(sl, n_phi=16):
    """Naive and effectivized band transforms from one ring slice."""
    nv = naive_vhat(sl)
    H0 = cauchy_H0(sl)
    H, report = solve_H(H0, n_phi=n_phi)
    eff = extract_vhat(H, "plus")
    return nv, eff, report


@dataclass
class PipelineResult:
    rho: float
    naive_err: float
    eff_err: float
    report: object
    recon: object
    errors: object


def run_pipeline(config, rho=None, out_dir=None):
    """One full run at a single rho: data -> dbar -> inversion -> report.

    Persists the slice, the band transforms, the reconstructed field, and a
    JSON report; returns the PipelineResult.
    """
    rho = float(config.rho_list[0] if rho is None else rho)
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    v = config.potential()
    sl = ring_slice(config, v, rho)
    save_container(out / f"slice_rho{rho:g}", {
        "p_nodes": sl.p_nodes, "values": sl.values,
        "valid": sl.valid.astype(np.uint8),
    }, meta={"rho": rho, "tau": config.tau, "route": config.route})

    nv, eff, report = reconstruct_slice(sl, n_phi=config.n_phi)
    vt = true_band_values(v, sl.p_nodes)
    pn = np.linalg.norm(sl.p_nodes, axis=1)
    naive_err = float(np.max(weighted_sup_values(nv.values - vt, pn, 2.0)))
    eff_err = float(np.max(weighted_sup_values(eff.values - vt, pn, 2.0)))

    v_rec = invert_bandlimited(eff, grid=v.grid)
    errors = error_report(v, v_rec, band=2.0 * config.tau * rho, rho=rho,
                          tau=config.tau, vhat_band=eff)
    save_container(out / f"recon_rho{rho:g}", {
        "v_rec": v_rec, "band_values": eff.values, "p_nodes": eff.p_nodes,
    }, meta={"rho": rho})
    payload = {
        "rho": rho, "naive_err": naive_err, "eff_err": eff_err,
        "linf_error": errors.linf_error, "i1": errors.i1,
        "i2_bound": errors.i2_bound,
        "iterations": report.iterations,
        "residuals": report.residual_history,
        "contraction": report.contraction_estimate,
        "extraction_spread": float(np.max(report.extraction_spread)),
        "converged": report.converged,
        "clips": {"below_level": report.clips.below_level,
                  "clamped_inner": report.clips.clamped_inner},
    }
    (out / f"report_rho{rho:g}.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return PipelineResult(rho=rho, naive_err=naive_err, eff_err=eff_err,
                          report=report, recon=eff, errors=errors)


def _write_csv(path, schema, fieldnames, rows):
    buf = io.StringIO()
    buf.write(f"# schema={schema}\n")
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    Path(path).write_text(buf.getvalue())


def fit_log_slope(x, y):
    """Least-squares slope of log y against log x (drops nonpositive y)."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    keep = (x > 0) & (y > 0)
    if keep.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)[0])


def sweep_rho(config, out_csv=None):
    """Decay of the naive vs effectivized band error over the rho list.

    Returns (rows, fits) and optionally writes the CSV; fits holds the two
    log-log slopes.
    """
    if len(config.rho_list) < 4:
        raise ValueError("need at least 4 rho values for a slope fit")
    v = config.potential()
    rows = []
    for rho in config.rho_list:
        sl = ring_slice(config, v, float(rho))
        mask_frac = 1.0 - float(np.mean(sl.valid))
        nv, eff, report = reconstruct_slice(sl, n_phi=config.n_phi)
        vt = true_band_values(v, sl.p_nodes)
        pn = np.linalg.norm(sl.p_nodes, axis=1)
        rows.append({
            "rho": float(rho),
            "band": 2.0 * config.tau * float(rho),
            "naive_err": float(np.max(weighted_sup_values(nv.values - vt, pn, 2.0))),
            "eff_err": float(np.max(weighted_sup_values(eff.values - vt, pn, 2.0))),
            "masked_fraction": mask_frac,
            "iterations": report.iterations,
            "contraction": report.contraction_estimate,
            "flagged": int(mask_frac > 0.2),
        })
    fits = {
        "naive_slope": fit_log_slope([r["rho"] for r in rows],
                                     [r["naive_err"] for r in rows]),
        "eff_slope": fit_log_slope([r["rho"] for r in rows],
                                   [r["eff_err"] for r in rows]),
    }
    if out_csv is not None:
        _write_csv(out_csv, CSV_SCHEMA_RHO, RHO_FIELDS, rows)
        Path(out_csv).with_suffix(".json").write_text(
            json.dumps(fits, indent=2, sort_keys=True) + "\n")
    return rows, fits


def rho_schedule(delta, beta, rho_cap):
    """rho(delta) = beta ln(3 + 1/delta), capped; returns (rho, capped)."""
    log_term = math.log(3.0 + (1.0 / delta if delta > 0 else float("inf")))
    if not math.isfinite(log_term):
        return float(rho_cap), True
    rho = beta * log_term
    return (float(rho_cap), True) if rho >= rho_cap else (rho, False)


def sweep_noise(config, out_csv=None):
    """Reconstruction error against boundary noise delta under the log-radius
    schedule rho = beta ln(3 + 1/delta).

    Each delta draws one noise realization (seeded per row), perturbs the
    boundary map to exact operator-norm delta, and runs the full pipeline at
    the scheduled rho.
    """
    if config.route != "dtn":
        raise ValueError("noise sweeps need route='dtn' (noise lives on the "
                         "boundary maps)")
    v = config.potential()
    rows = []
    for i, delta in enumerate(config.deltas):
        rho, capped = rho_schedule(float(delta), config.beta, config.rho_cap)
        noise = (NoiseModel(kind=config.noise_kind, delta=float(delta),
                            seed=config.seed * 1000 + i)
                 if delta > 0 else None)
        sl = ring_slice(config, v, rho, noise=noise)
        nv, eff, report = reconstruct_slice(sl, n_phi=config.n_phi)
        vt = true_band_values(v, sl.p_nodes)
        pn = np.linalg.norm(sl.p_nodes, axis=1)
        band_err = float(np.max(weighted_sup_values(eff.values - vt, pn, 2.0)))
        v_rec = invert_bandlimited(eff, grid=v.grid)
        errors = error_report(v, v_rec, band=2.0 * config.tau * rho,
                              rho=rho, tau=config.tau, delta=float(delta))
        rows.append({
            "delta": float(delta),
            "log_term": math.log(3.0 + 1.0 / delta) if delta > 0 else float("inf"),
            "rho": rho,
            "capped": int(capped),
            "linf_error": errors.linf_error,
            "band_err": band_err,
            "i2_bound": errors.i2_bound,
            "seed": i,
        })
    finite = [r for r in rows if math.isfinite(r["log_term"])]
    fits = {"noise_exponent": fit_log_slope(
        [r["log_term"] for r in finite], [r["linf_error"] for r in finite])}
    if out_csv is not None:
        _write_csv(out_csv, CSV_SCHEMA_NOISE, NOISE_FIELDS, rows)
        Path(out_csv).with_suffix(".json").write_text(
            json.dumps(fits, indent=2, sort_keys=True) + "\n")
    return rows, fits

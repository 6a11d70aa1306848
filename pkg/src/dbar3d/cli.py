"""Command-line entry point for the reconstruction experiments.

Subcommands:
  forward          build the boundary maps for the configured potential
  scatter          ring scattering data at one rho -> container
  dbar             container of ring data -> band transform + report
  reconstruct      full single-rho pipeline (data -> dbar -> inversion)
  sweep-rho        decay comparison CSV over the rho list
  sweep-noise      noise-stability CSV over the delta list
  verify-constants sanity-check the closed-form constants

Configuration is a single JSON file mirroring ExperimentConfig; --seed and
--out override the config values.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .boundary import ScatteringSlice
from .constants import c6_constant, q_radius
from .containers import load_container, save_container
from .dbar import extract_vhat, naive_vhat
from .fourier import invert_bandlimited
from .pipeline import (ExperimentConfig, reconstruct_slice, ring_slice,
                       run_pipeline, sweep_noise, sweep_rho)


def _load_config(args):
    cfg = (ExperimentConfig.from_json(args.config) if args.config
           else ExperimentConfig())
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out_dir = args.out
    return cfg


def _limit_threads(n):
    if n is not None:
        try:
            import threadpoolctl
            threadpoolctl.threadpool_limits(n)
        except ImportError:
            import os
            os.environ["OMP_NUM_THREADS"] = str(n)


def cmd_forward(args):
    cfg = _load_config(args)
    v = cfg.potential()
    from .forward import dtn_general, dtn_radial, dtn_zero
    L = cfg.harmonic_degree
    phi_v = (dtn_radial(v, L) if v.radial_profile is not None
             else dtn_general(v, L))
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_container(out / "forward", {
        "phi_v": phi_v.matrix, "phi_0": dtn_zero(L).matrix,
    }, meta={"L": L, "profile": cfg.profile})
    print(f"wrote {out / 'forward'}.json (L={L})")


def cmd_scatter(args):
    cfg = _load_config(args)
    rho = args.rho if args.rho is not None else cfg.rho_list[0]
    v = cfg.potential()
    sl = ring_slice(cfg, v, float(rho))
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = save_container(out / f"slice_rho{float(rho):g}", {
        "p_nodes": sl.p_nodes, "values": sl.values,
        "valid": sl.valid.astype(np.uint8),
    }, meta={"rho": float(rho), "tau": cfg.tau, "nu": list(cfg.nu),
             "n_radial": cfg.n_radial, "n_angular": cfg.n_angular,
             "n_p": cfg.n_p, "log_span": cfg.log_span, "route": cfg.route})
    print(f"wrote {path} ({int(sl.valid.sum())} valid nodes)")


def _slice_from_container(path, cfg):
    arrays, meta = load_container(path)
    lgrid = cfg.lambda_grid(meta["rho"])
    return ScatteringSlice(grid=lgrid, p_nodes=arrays["p_nodes"],
                           values=arrays["values"],
                           valid=arrays["valid"].astype(bool),
                           route=meta.get("route", "direct"))


def cmd_dbar(args):
    cfg = _load_config(args)
    sl = _slice_from_container(Path(args.slice).with_suffix(""), cfg)
    nv, eff, report = reconstruct_slice(sl, n_phi=cfg.n_phi)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_container(out / "band", {
        "p_nodes": eff.p_nodes, "effectivized": eff.values,
        "naive": nv.values,
    }, meta={"rho": sl.grid.rho, "tau": sl.grid.tau})
    payload = {
        "iterations": report.iterations,
        "residuals": report.residual_history,
        "contraction": report.contraction_estimate,
        "extraction_spread": float(np.max(report.extraction_spread)),
        "converged": report.converged,
        "clips": {"below_level": report.clips.below_level,
                  "clamped_inner": report.clips.clamped_inner},
    }
    (out / "dbar_report.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out / 'band'}.json and dbar_report.json "
          f"(converged={report.converged})")


def cmd_reconstruct(args):
    cfg = _load_config(args)
    rho = args.rho if args.rho is not None else cfg.rho_list[0]
    result = run_pipeline(cfg, rho=float(rho))
    print(f"rho={result.rho:g}: naive_err={result.naive_err:.4e} "
          f"eff_err={result.eff_err:.4e} "
          f"linf={result.errors.linf_error:.4e}")


def cmd_sweep_rho(args):
    cfg = _load_config(args)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows, fits = sweep_rho(cfg, out_csv=out / "rho_sweep.csv")
    for row in rows:
        print(f"rho={row['rho']:g}: naive={row['naive_err']:.4e} "
              f"eff={row['eff_err']:.4e}")
    print(f"slopes: naive={fits['naive_slope']:.3f} "
          f"eff={fits['eff_slope']:.3f}")


def cmd_sweep_noise(args):
    cfg = _load_config(args)
    cfg.route = "dtn"
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows, fits = sweep_noise(cfg, out_csv=out / "noise_sweep.csv")
    for row in rows:
        print(f"delta={row['delta']:.1e}: rho={row['rho']:.3f} "
              f"linf={row['linf_error']:.4e} capped={row['capped']}")
    print(f"noise exponent: {fits['noise_exponent']:.3f}")


def cmd_verify_constants(args):
    ok = True
    c6 = c6_constant()
    bound = 1.0 / (2.0 * np.sqrt(3.0) - 3.0)
    if not (0.0 < c6 <= bound + 1e-6):
        ok = False
    print(f"c6 = {c6:.6f} (bound {bound:.6f}) {'ok' if ok else 'FAIL'}")
    for r in (0.6, 1.0, 2.0, 5.0):
        q = q_radius(r)
        resid = abs(q + 1.0 / q - 4.0 * r)
        good = resid < 1e-12
        ok = ok and good
        print(f"q({r}) + 1/q({r}) - 4r = {resid:.2e} {'ok' if good else 'FAIL'}")
    return 0 if ok else 1


def main(argv=None):
    parser = argparse.ArgumentParser(prog="dbar3d",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON experiment config")
    parser.add_argument("--seed", type=int, help="override config seed")
    parser.add_argument("--out", help="override output directory")
    parser.add_argument("--threads", type=int, help="BLAS thread cap")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("forward")
    p = sub.add_parser("scatter")
    p.add_argument("--rho", type=float)
    p = sub.add_parser("dbar")
    p.add_argument("slice", help="path of a slice container (no extension)")
    p = sub.add_parser("reconstruct")
    p.add_argument("--rho", type=float)
    sub.add_parser("sweep-rho")
    sub.add_parser("sweep-noise")
    sub.add_parser("verify-constants")

    args = parser.parse_args(argv)
    _limit_threads(args.threads)
    handlers = {
        "forward": cmd_forward, "scatter": cmd_scatter, "dbar": cmd_dbar,
        "reconstruct": cmd_reconstruct, "sweep-rho": cmd_sweep_rho,
        "sweep-noise": cmd_sweep_noise,
        "verify-constants": cmd_verify_constants,
    }
    rc = handlers[args.command](args)
    return 0 if rc is None else rc


if __name__ == "__main__":
    sys.exit(main())

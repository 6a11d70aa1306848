"""Acceptance suite: one test per headline criterion, each printing a single
PASS/FAIL line (visible via ``pytest -v``; details print on failure).

Shared reference potential: the radial bump A (1 - (r/R)^2)^4 with A = 8,
R = 0.9 — smooth enough for band-limited reconstruction, cheap to resolve.
"""

import numpy as np
import pytest

from dbar3d.boundary import h_from_dtn, scattering_slice_direct
from dbar3d.constants import c6_constant, q_radius
from dbar3d.coords import (ComplexMomentum, ThetaPoint, build_lambda_grid,
                           frame, k_from_lambda, lambda_from_k, xi_from_k)
from dbar3d.dbar import (ClipCounters, LambdaField, area_op_M, bracket_batch,
                         cauchy_H0, cauchy_templates, solve_H)
from dbar3d.faddeev import scattering_h, solve_mu
from dbar3d.forward import dtn_radial, dtn_zero
from dbar3d.grids import Potential, make_volume_grid
from dbar3d.pipeline import ExperimentConfig, sweep_noise, sweep_rho
from dbar3d.sphere import make_boundary_quadrature

NU = np.array([0.0, 0.0, 1.0])
F = frame(NU)
AMP, SUPP = 8.0, 0.9


def _report(num, ok, detail):
    flag = "PASS" if ok else "FAIL"
    print(f"[criterion {num}] {flag} — {detail}")
    assert ok, f"criterion {num}: {detail}"


def bump_profile(r):
    return AMP * np.maximum(0.0, 1.0 - (r / SUPP) ** 2) ** 4


def bump_on(grid):
    return Potential.from_radial(grid, bump_profile, m=4)


def lattice_vhat(v, p):
    x, y, z = v.grid.mesh()
    xs = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)
    ph = np.exp(1j * (xs @ np.asarray(p, dtype=float)))
    return complex(v.values.ravel() @ ph) * v.grid.cell_volume / (2 * np.pi) ** 3


def theta_point(lam, p, f=F):
    k = k_from_lambda(lam, p, f)
    lv = k.vec - np.asarray(p, dtype=float)
    return ThetaPoint(k, ComplexMomentum(lv.real, lv.imag))


# ---------------------------------------------------------------------------
# 1. constants


def test_criterion_1_constants():
    c6 = c6_constant()
    ok = 0.0 < c6 <= 2.154701 + 1e-6
    worst = 0.0
    for r in (0.6, 1.0, 2.0, 5.0):
        q = q_radius(r)
        worst = max(worst, abs(q + 1.0 / q - 4.0 * r))
    ok = ok and worst < 1e-12
    _report(1, ok, f"c6={c6:.6f}, max |q + 1/q - 4r| = {worst:.2e}")


# ---------------------------------------------------------------------------
# 2. coordinate suite


def test_criterion_2_coordinates():
    rng = np.random.default_rng(7)
    n = 10_000
    lam = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), n)) * np.exp(
        1j * rng.uniform(-np.pi, np.pi, n))
    ps = rng.normal(size=(n, 3))
    keep = np.linalg.norm(np.cross(NU, ps), axis=1) > 0.05 * np.linalg.norm(
        ps, axis=1)
    lam, ps = lam[keep], ps[keep]
    worst_rt = worst_var = 0.0
    for l0, p in zip(lam, ps):
        k = k_from_lambda(l0, p, F)
        worst_rt = max(worst_rt,
                       abs(lambda_from_k(k, p, F) - l0) / max(1.0, abs(l0)))
        kv = k.vec
        pn = np.linalg.norm(p)
        scale = max(1.0, np.linalg.norm(kv)) ** 2
        worst_var = max(worst_var, abs(kv @ kv) / scale,
                        abs(p @ p - 2.0 * (kv @ p)) / scale)
        expected = pn / 4.0 * (abs(l0) + 1.0 / abs(l0))
        worst_var = max(
            worst_var,
            abs(np.linalg.norm(k.re) - expected) / max(1.0, expected),
            abs(np.linalg.norm(k.im) - expected) / max(1.0, expected))
    worst_xi = 0.0
    phis = np.linspace(-np.pi, np.pi, 64, endpoint=False)
    for l0, p in zip(lam[:20], ps[:20]):
        k = k_from_lambda(l0, p, F)
        rho = np.linalg.norm(k.im)
        s2 = max(1.0, rho) ** 2
        for phi in phis:
            shifted = k.vec + xi_from_k(k, phi)
            worst_xi = max(
                worst_xi, abs(shifted @ shifted) / s2,
                abs(np.linalg.norm(shifted.imag) - rho) / max(1.0, rho))
    ok = worst_rt <= 1e-12 and worst_var <= 1e-10 and worst_xi <= 1e-10
    _report(2, ok, f"roundtrip {worst_rt:.2e}, variety {worst_var:.2e}, "
                   f"xi-invariance {worst_xi:.2e}")


# ---------------------------------------------------------------------------
# 3. Born decay slope (expected slope -1 per momentum; see the note below)


def test_criterion_3_born_decay():
    # Faithful implementation of the -1.0 +/- 0.3 slope check on
    # |vhat(p) - h| over rho in {3, 4.5, 6, 9} at 5 fixed p.  The measured
    # slopes are steeper/scattered at several p because the leading
    # second-order term changes sign inside the rho range (the error curves
    # are non-monotone), so this criterion fails honestly at desk scale.
    g = make_volume_grid(32, 2.0)
    v = bump_on(g)
    ps = np.array([[1.0, 0.5, 0.3], [0.6, -1.1, 0.4], [1.4, 0.2, -0.8],
                   [0.3, 0.9, 1.2], [-0.7, 1.0, 0.5]])
    rhos = np.array([3.0, 4.5, 6.0, 9.0])
    slopes = []
    for p in ps:
        vp = lattice_vhat(v, p)
        errs = []
        for rho in rhos:
            q = q_radius(rho / np.linalg.norm(p))
            pt = theta_point(1j * q, p)
            h = scattering_h(v, pt, solve_mu(v, pt.k))
            errs.append(abs(vp - h))
        slopes.append(float(np.polyfit(np.log(rhos), np.log(errs), 1)[0]))
    ok = all(-1.3 <= s <= -0.7 for s in slopes)
    _report(3, ok, "slopes " + ", ".join(f"{s:.2f}" for s in slopes)
            + " (target -1.0 +/- 0.3)")


# ---------------------------------------------------------------------------
# 4. boundary-data route equals volume route


def test_criterion_4_dtn_oracle_equivalence():
    g = make_volume_grid(32, 2.0)
    v = bump_on(g)
    L = 10
    phi_v, phi_0 = dtn_radial(v, L), dtn_zero(L)
    quad = make_boundary_quadrature(L)
    rels = []
    for rho in (3.0, 5.0):
        for p in (np.array([1.0, 0.5, 0.3]), np.array([1.4, -0.8, 0.5])):
            q = q_radius(rho / np.linalg.norm(p))
            for j in range(5):
                lam = q * np.exp(1j * (-np.pi + 2 * np.pi * (j + 0.5) / 5))
                pt = theta_point(lam, p)
                hb = h_from_dtn(phi_v, phi_0, pt, quad, g)
                hv = scattering_h(v, pt, solve_mu(v, pt.k))
                rels.append(abs(hb - hv) / abs(hv))
    worst = max(rels)
    _report(4, len(rels) >= 20 and worst <= 0.05,
            f"{len(rels)} nodes, worst relative discrepancy {worst:.4f}")


# ---------------------------------------------------------------------------
# 5. Cauchy ring + area operator + the d-bar identity on exact data


def test_criterion_5_cauchy_dbar_machinery():
    # (a) ring Cauchy reproduction of zeta^n, both branches, 256 nodes
    grid = build_lambda_grid(4.0, 0.45, NU, n_p=2, n_radial=4, n_angular=256)
    cp, cm = cauchy_templates(grid)
    z_ring = np.exp(1j * grid.angles)
    z_int = grid.template().ravel()
    w_int = 1.0 / np.conj(z_int)
    ring_err = 0.0
    for n in range(1, 5):
        ring_err = max(ring_err,
                       np.max(np.abs(cp @ z_ring ** n - z_int ** n)),
                       np.max(np.abs(cm @ z_ring ** -n - w_int ** -n)))

    # (b) quadratic homogeneity of the area operator
    small = build_lambda_grid(4.0, 0.45, NU, n_p=4, n_radial=4, n_angular=16)
    rng = np.random.default_rng(5)
    shape = (2, small.n_radial + 1, small.n_angular) + small.p_mask().shape
    U = LambdaField(grid=small, values=1e-2 * (
        rng.normal(size=shape) + 1j * rng.normal(size=shape)))
    eps = 0.25
    M1 = area_op_M(U, n_phi=8)
    M2 = area_op_M(LambdaField(grid=small, values=eps * U.values), n_phi=8)
    hom_err = np.max(np.abs(M2.values - eps ** 2 * M1.values)) / np.max(
        np.abs(M1.values))

    # (c) integrated d-bar identity on exact scattering data at one (rho, p):
    # ring average of h minus vhat(p) equals (1/pi) x the area integral of
    # the self-bracket of vhat over the small disc, divided by zeta.  The
    # 64^3 half-width-4 grid keeps the dual-lattice dispersion bias of h at
    # the few-percent level; the bracket side uses the continuum radial
    # transform of the same bump (a lattice phase sum would alias at the
    # large |xi| arguments the bracket generates near lambda -> 0).
    rho, p = 5.0, np.array([1.1, 0.8, 1.4])
    pn = np.linalg.norm(p)
    q = q_radius(rho / pn)
    g = make_volume_grid(64, 4.0)
    v = bump_on(g)
    na_ring = 32
    avg = 0.0
    for j in range(na_ring):
        lam = q * np.exp(1j * (-np.pi + 2 * np.pi * j / na_ring))
        pt = theta_point(lam, p)
        avg += scattering_h(v, pt, solve_mu(v, pt.k))
    lhs = avg / na_ring - lattice_vhat(v, p)

    gl_x, gl_w = np.polynomial.legendre.leggauss(2000)
    rj = 0.5 * SUPP * (gl_x + 1.0)
    wj = 0.5 * SUPP * gl_w * bump_profile(rj) * rj

    def vhat_cont(lam_b, p_b, counters):
        pn_b = np.linalg.norm(p_b, axis=-1)
        out = np.zeros(pn_b.shape)
        ok = (pn_b > 1e-12) & (pn_b < 60.0)
        pns = pn_b[ok]
        out[ok] = ((wj[None, :] * np.sin(np.outer(pns, rj))).sum(axis=1)
                   / (2.0 * np.pi ** 2 * pns))
        return out.astype(complex)

    lgrid = build_lambda_grid(rho, 0.45, NU, n_p=4, n_radial=6, n_angular=16)
    nr, na = 40, 32
    s = np.linspace(np.log(1e-3), 0.0, nr + 1)
    rc = q * np.exp(0.5 * (s[1:] + s[:-1]))
    areas = 0.5 * (np.exp(2 * s[1:]) - np.exp(2 * s[:-1])) * q * q * (
        2.0 * np.pi / na)
    th = -np.pi + 2.0 * np.pi * (np.arange(na) + 0.5) / na
    Z = rc[:, None] * np.exp(1j * th)[None, :]
    W = bracket_batch(vhat_cont, vhat_cont, lgrid, Z.ravel(),
                      np.broadcast_to(p, (Z.size, 3)).copy(), 64,
                      ClipCounters(), window=False).reshape(nr, na)
    rhs = complex(np.sum(W / Z * areas[:, None]) / np.pi)
    dbar_rel = abs(lhs - rhs) / abs(rhs)

    ok = ring_err <= 1e-3 and hom_err <= 1e-12 and dbar_rel <= 0.20
    _report(5, ok, f"ring reproduction {ring_err:.2e}, homogeneity "
                   f"{hom_err:.2e}, d-bar identity rel {dbar_rel:.3f} "
                   f"(lhs {lhs:.3e}, rhs {rhs:.3e})")


# ---------------------------------------------------------------------------
# 6. effectivized vs naive decay


def test_criterion_6_effectivized_decay():
    cfg = ExperimentConfig(profile="poly", amplitude=AMP, support_radius=SUPP,
                           power=4, n_volume=40, half_width=2.0, tau=0.45,
                           n_p=4, n_radial=6, n_angular=32, n_phi=16,
                           route="direct", rho_list=(3.0, 4.5, 6.0, 9.0))
    rows, fits = sweep_rho(cfg)
    gap = abs(fits["eff_slope"]) - abs(fits["naive_slope"])
    _report(6, gap >= 0.5,
            f"naive slope {fits['naive_slope']:.2f}, effectivized slope "
            f"{fits['eff_slope']:.2f}, gap {gap:.2f} (need >= 0.5)")


# ---------------------------------------------------------------------------
# 7. fixed-point contract


def test_criterion_7_fixed_point_contract():
    g = make_volume_grid(24, 2.0)
    v = bump_on(g)
    lg = build_lambda_grid(4.0, 0.45, NU, n_p=2, n_radial=4, n_angular=16)
    sl = scattering_slice_direct(v, lg)
    H0 = cauchy_H0(sl)
    U, rep = solve_H(H0, tol=1e-13, max_iter=12, n_phi=16)
    varrho = rep.contraction_estimate
    hist = rep.residual_history
    ratios = [hist[i + 1] / hist[i] for i in range(len(hist) - 1)
              if hist[i + 1] > 1e-12]
    # the first step still carries the quadratic correction; the asymptotic
    # ratios must sit within 20% of the reported contraction
    asym = ratios[1:] if len(ratios) > 1 else ratios
    geo_ok = (varrho < 1.0 and len(asym) >= 1
              and all(abs(r / varrho - 1.0) <= 0.2 for r in asym))
    pert = LambdaField(H0.grid, H0.values + 1e-3)
    U2, _ = solve_H(pert, tol=1e-13, max_iter=12, n_phi=16)
    response = float(np.max(np.abs(U2.values - U.values)))
    bound = 1e-3 * 1.5 / (1.0 - varrho)
    _report(7, geo_ok and rep.converged and response <= bound,
            f"contraction {varrho:.2e}, ratios "
            + ", ".join(f"{r:.2e}" for r in ratios)
            + f"; perturbation response {response:.2e} <= bound {bound:.2e}")


# ---------------------------------------------------------------------------
# 8. noise stability sweep shape


def test_criterion_8_noise_sweep_shape():
    cfg = ExperimentConfig(profile="poly", amplitude=AMP, support_radius=SUPP,
                           power=4, n_volume=32, half_width=2.0, n_p=2,
                           n_radial=4, n_angular=8, n_phi=8, route="dtn",
                           harmonic_degree=8,
                           deltas=(1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8),
                           beta=0.6, rho_cap=5.0, seed=1)
    rows, fits = sweep_noise(cfg)
    errs = [r["linf_error"] for r in rows]
    inversions = sum(1 for a, b in zip(errs, errs[1:]) if b > a * 1.0001)
    _report(8, inversions <= 1,
            f"{inversions} inversion(s) over {len(errs)} deltas; fitted "
            f"log-exponent {fits['noise_exponent']:.2f} (reported, not "
            f"asserted)")

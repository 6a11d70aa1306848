import numpy as np
import pytest

from dbar3d.coords import canonical_theta_point, frame
from dbar3d.faddeev import (faddeev_g, faddeev_g_at, faddeev_symbol, solve_mu,
                            scattering_h)
from dbar3d.grids import Potential, make_volume_grid
from dbar3d.pipeline import true_band_values

NU = np.array([0.0, 0.0, 1.0])
F = frame(NU)


def bump(g, a=4.0):
    return Potential.from_radial(
        g, lambda r: a * np.maximum(0.0, 1.0 - (r / 0.9) ** 2) ** 4, m=4)


def canonical_k(rho=3.0, p=(1.1, 0.6, 0.8)):
    return canonical_theta_point(np.asarray(p), rho, F)


def test_symbol_never_singular_on_offset_grid():
    g = make_volume_grid(16, 1.5)
    pt = canonical_k()
    sym = faddeev_symbol(pt.k, g)
    assert np.all(np.isfinite(sym))


def test_g_at_matches_grid_samples():
    g = make_volume_grid(12, 1.5)
    pt = canonical_k()
    gg = faddeev_g(pt.k, g)
    x, y, z = g.mesh()
    idx = [(2, 3, 4), (7, 1, 9)]
    diffs = np.array([[x[i], y[i], z[i]] for i in idx])
    direct = faddeev_g_at(pt.k, g, diffs)
    for d, i in zip(direct, idx):
        assert abs(d - gg[i]) < 1e-12 * max(1.0, abs(gg[i]))


def test_mu_zero_potential_is_one():
    g = make_volume_grid(12, 1.5)
    v = Potential(g, np.zeros((12, 12, 12)))
    sol = solve_mu(v, canonical_k().k)
    assert np.max(np.abs(sol.mu - 1.0)) < 1e-12


def test_mu_converges_and_contracts():
    g = make_volume_grid(24, 1.5)
    v = bump(g)
    sol = solve_mu(v, canonical_k(rho=4.0).k)
    assert sol.residual < 1e-9
    assert sol.contraction < 1.0


def test_scattering_h_zero_potential():
    g = make_volume_grid(12, 1.5)
    v = Potential(g, np.zeros((12, 12, 12)))
    assert abs(scattering_h(v, canonical_k())) == 0.0


def test_scattering_h_approaches_vhat_at_large_rho():
    # Born convergence: |h - vhat(p)| shrinks as rho grows at fixed p
    g = make_volume_grid(32, 2.0)
    v = bump(g, a=4.0)
    p = np.array([1.1, 0.6, 0.8])
    vt = true_band_values(v, p[None, :])[0]
    errs = []
    for rho in (3.0, 6.0, 12.0):
        h = scattering_h(v, canonical_theta_point(p, rho, F))
        errs.append(abs(h - vt))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 5e-4


def test_scattering_h_grid_stable():
    # lattice data floor: refining the volume grid moves h only marginally
    p = np.array([1.1, 0.6, 0.8])
    pt = canonical_theta_point(p, 4.0, F)
    vals = []
    for n in (32, 40):
        g = make_volume_grid(n, 2.0)
        vals.append(scattering_h(bump(g), pt))
    assert abs(vals[0] - vals[1]) < 1e-6

import numpy as np

from dbar3d.grids import make_volume_grid
from dbar3d.potentials import (gaussian_profile, poly_bump_profile,
                               reference_bump, smooth_bump_profile)


def test_poly_bump_support_and_peak():
    prof = poly_bump_profile(8.0, 0.9, 4)
    assert prof(0.0) == 8.0
    assert prof(0.9) == 0.0
    assert prof(1.5) == 0.0
    r = np.linspace(0, 0.89, 50)
    assert np.all(np.diff(prof(r)) < 0)


def test_smooth_bump_vanishes_flat():
    prof = smooth_bump_profile(8.0, 0.9)
    assert prof(0.0) == 8.0
    assert prof(0.9) == 0.0
    # C-infinity cutoff: extremely flat near the edge
    assert prof(0.89) < 1e-10


def test_gaussian_truncated():
    prof = gaussian_profile(8.0, 0.25, 0.95)
    assert prof(0.0) == 8.0
    assert prof(0.96) == 0.0
    assert prof(0.5) > 0


def test_reference_bump_field():
    g = make_volume_grid(16, 1.5)
    v = reference_bump(g)
    assert v.values.max() > 0
    assert np.all(v.values[g.radius() > 0.9] == 0.0)
    assert v.m == 4

import numpy as np
import pytest

from dbar3d.fourier import (error_report, fourier_direct, invert_bandlimited)
from dbar3d.grids import FrequencyField, Potential, make_volume_grid
from dbar3d.potentials import gaussian_profile


def bump(g, a=1.0):
    return Potential.from_radial(g, lambda r: a * np.maximum(0.0, 1.0 - r ** 2) ** 2)


def test_zero_frequency_is_mean():
    g = make_volume_grid(16, 1.5)
    v = bump(g)
    vh = fourier_direct(v)
    integral = np.sum(v.values) * g.cell_volume / (2.0 * np.pi) ** 3
    px, py, pz = g.dual_mesh()
    pn = px ** 2 + py ** 2 + pz ** 2
    i = np.unravel_index(np.argmin(pn), pn.shape)
    # nearest-to-zero node of the offset grid: compare against the direct sum
    x, y, z = g.mesh()
    direct = np.sum(v.values * np.exp(1j * (px[i] * x + py[i] * y + pz[i] * z)))
    direct *= g.cell_volume / (2.0 * np.pi) ** 3
    assert abs(vh.values[i] - direct) < 1e-12
    # offset grid: the node nearest zero sits at |p| ~ sqrt(3) dxi / 2, so it
    # only approximates the p = 0 mean
    assert abs(vh.values[i] - integral) < 0.25 * abs(integral)


def test_conjugate_symmetry_real_potential():
    g = make_volume_grid(12, 1.5)
    vh = fourier_direct(bump(g))
    # offset dual axis maps to its negation under index reversal
    flipped = np.conj(vh.values[::-1, ::-1, ::-1])
    assert np.max(np.abs(vh.values - flipped)) < 1e-12


def test_gaussian_closed_form():
    g = make_volume_grid(32, 2.0)
    a = 1.0 / (2.0 * 0.25 ** 2)
    v = Potential.from_radial(g, gaussian_profile(1.0, 0.25, 0.999))
    vh = fourier_direct(v)
    px, py, pz = g.dual_mesh()
    pn2 = px ** 2 + py ** 2 + pz ** 2
    exact = (np.pi / a) ** 1.5 / (2.0 * np.pi) ** 3 * np.exp(-pn2 / (4.0 * a))
    # tolerance dominated by the r > 0.999 truncation of the Gaussian
    assert np.max(np.abs(vh.values - exact)) < 5e-5


def test_bandlimited_round_trip():
    g = make_volume_grid(16, 1.5)
    v = bump(g)
    vh = fourier_direct(v)
    vh.band_radius = 1e9  # keep every mode
    back = invert_bandlimited(vh)
    assert np.max(np.abs(back - v.values)) < 1e-10


def test_zero_field_inverts_to_zero():
    g = make_volume_grid(12, 1.5)
    vh = FrequencyField(grid=g, values=np.zeros((12, 12, 12)), band_radius=3.0)
    assert np.max(np.abs(invert_bandlimited(vh))) == 0.0


def test_wider_band_reduces_error():
    g = make_volume_grid(24, 1.5)
    v = bump(g)
    vh = fourier_direct(v)
    errs = []
    for band in (4.0, 8.0, 16.0):
        f = FrequencyField(grid=g, values=vh.values, band_radius=band)
        rec = invert_bandlimited(f)
        errs.append(np.max(np.abs(rec - v.values)[g.radius() < 1.0]))
    assert errs[0] > errs[1] > errs[2]


def test_error_report_identity_and_scaling():
    g = make_volume_grid(12, 1.5)
    v = bump(g)
    rep = error_report(v, v.values, band=5.0)
    assert rep.linf_error == 0.0
    rep2 = error_report(v, v.values + 0.5, band=5.0)
    assert rep2.linf_error == pytest.approx(0.5)
    assert rep2.i2_bound >= 0.0

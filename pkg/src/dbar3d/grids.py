"""Cartesian volume grid, its half-cell-offset dual grid, and the sampled fields.

The computational domain is the cube [-hw, hw]^3 containing the unit ball D
where the potential is supported.  Volume nodes sit at cell centers and dual
frequencies are offset by half a cell, so no frequency hits an exact zero of
the Faddeev symbol.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class VolumeGrid:
    """Uniform cell-centered grid on [-half_width, half_width]^3."""

    n_per_axis: int
    half_width: float

    def __post_init__(self):
        if self.n_per_axis < 8 or self.n_per_axis % 2 != 0:
            raise ValueError("n must be even and >= 8")
        if self.half_width <= 1.0:
            raise ValueError("half_width must exceed 1 (cube must contain the unit ball)")

    @property
    def spacing(self):
        return 2.0 * self.half_width / self.n_per_axis

    @property
    def axis(self):
        """Cell-center coordinates along one axis."""
        h = self.spacing
        return -self.half_width + (np.arange(self.n_per_axis) + 0.5) * h

    @property
    def dual_axis(self):
        """Half-cell-offset frequencies along one axis (ascending)."""
        dxi = np.pi / self.half_width
        n = self.n_per_axis
        return (np.arange(n) - n / 2 + 0.5) * dxi

    def mesh(self):
        """Node coordinates, three (n,n,n) arrays."""
        a = self.axis
        return np.meshgrid(a, a, a, indexing="ij")

    def dual_mesh(self):
        a = self.dual_axis
        return np.meshgrid(a, a, a, indexing="ij")

    def radius(self):
        """|x| at the nodes."""
        x, y, z = self.mesh()
        return np.sqrt(x * x + y * y + z * z)

    @property
    def cell_volume(self):
        return self.spacing ** 3


def make_volume_grid(n, half_width):
    return VolumeGrid(int(n), float(half_width))


def _axis_phases(grid):
    """1D phase factors turning numpy's FFT into the offset-grid transform.

    With x_j = x0 + j h and xi_m = dxi (m - n/2 + 1/2) (m ascending),
    sum_j f_j exp(-i xi_m x_j) = exp(-i m dxi x0) * FFT[f_j exp(-i c x_j)]_m
    where c = dxi (1/2 - n/2).
    """
    n = grid.n_per_axis
    dxi = np.pi / grid.half_width
    x = grid.axis
    x0 = x[0]
    c = dxi * (0.5 - n / 2)
    pre = np.exp(-1j * c * x)
    post = np.exp(-1j * np.arange(n) * dxi * x0)
    return pre, post


def offset_fft3(grid, f):
    """F(xi_m) = h^3 sum_j f(x_j) exp(-i xi_m . x_j) on the offset dual grid."""
    pre, post = _axis_phases(grid)
    g = f * pre[:, None, None] * pre[None, :, None] * pre[None, None, :]
    F = np.fft.fftn(g)
    F *= post[:, None, None] * post[None, :, None] * post[None, None, :]
    return F * grid.cell_volume


def offset_ifft3(grid, F):
    """f(x_j) = dxi^3/(2 pi)^3 sum_m F(xi_m) exp(+i xi_m . x_j), inverse of offset_fft3."""
    pre, post = _axis_phases(grid)
    G = F * np.conj(post)[:, None, None] * np.conj(post)[None, :, None] * np.conj(post)[None, None, :]
    g = np.fft.ifftn(G) * grid.n_per_axis ** 3
    g *= np.conj(pre)[:, None, None] * np.conj(pre)[None, :, None] * np.conj(pre)[None, None, :]
    dxi = np.pi / grid.half_width
    return g * dxi ** 3 / (2.0 * np.pi) ** 3


@dataclass
class Potential:
    """Real potential sampled on a VolumeGrid, supported in the unit ball.

    m and norm_bound are smoothness metadata (W^{m,1} order and norm bound)
    used only to label experiments.  radial_profile, when present, is a
    callable of r that generated the samples and enables the exact radial
    DtN oracle.
    """

    grid: VolumeGrid
    values: np.ndarray
    m: int = 4
    norm_bound: float = 1.0
    radial_profile: object = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_per_axis,) * 3:
            raise ValueError("values shape does not match grid")
        outside = self.grid.radius() > 1.0
        if np.any(np.abs(self.values[outside]) > 0):
            raise ValueError("potential must vanish outside the unit ball")

    @classmethod
    def from_radial(cls, grid, profile, m=4, norm_bound=1.0):
        r = grid.radius()
        vals = np.where(r <= 1.0, profile(np.minimum(r, 1.0)), 0.0)
        vals[r > 1.0] = 0.0
        return cls(grid, vals, m=m, norm_bound=norm_bound, radial_profile=profile)


@dataclass
class FrequencyField:
    """Complex field on the dual grid of a VolumeGrid (or on a listed p-set)."""

    grid: VolumeGrid
    values: np.ndarray
    band_radius: float = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)

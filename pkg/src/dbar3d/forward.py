"""Dirichlet-to-Neumann maps on the unit sphere for -Delta u + v u = 0.

A DtN map is stored as a matrix acting on coefficients in the real harmonic
basis of degree <= L.  Three constructors are provided: the exact map for
v = 0 (diagonal, entry l), an exact radial-ODE solver for radial potentials
(the primary ground-truth oracle), and a coarse Cartesian finite-difference
solver for general potentials.  Noise perturbations with a prescribed
operator norm feed the stability sweeps.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import splu

from .sphere import basis_degrees, basis_size

DIRICHLET_EIGENVALUE_FLOOR = 1e-8


@dataclass(frozen=True)
class DtNMap:
    """Matrix of the boundary map in the real harmonic basis, degrees 0..L."""

    matrix: np.ndarray
    L: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (basis_size(self.L), basis_size(self.L)):
            raise ValueError("DtN matrix shape does not match (L+1)^2")
        object.__setattr__(self, "matrix", m)

    def apply(self, coeffs):
        return self.matrix @ np.asarray(coeffs)


@dataclass(frozen=True)
class NoiseModel:
    """Symmetric perturbation with operator norm delta, deterministic in seed."""

    kind: str = "gaussian-entrywise"
    delta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gaussian-entrywise", "rank-structured"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")

    def draw(self, size):
        """Symmetric matrix E with opnorm(E) = delta (exactly, by rescaling)."""
        if self.delta == 0.0:
            return np.zeros((size, size))
        rng = np.random.default_rng(self.seed)
        if self.kind == "rank-structured":
            u = rng.standard_normal(size)
            u /= np.linalg.norm(u)
            return self.delta * np.outer(u, u)
        g = rng.standard_normal((size, size))
        e = 0.5 * (g + g.T)
        return e * (self.delta / np.linalg.norm(e, 2))


def dtn_zero(L):
    """Exact map for v = 0: the harmonic extension of Y_lm is r^l Y_lm."""
    return DtNMap(matrix=np.diag(basis_degrees(L).astype(float)), L=L)


def dtn_radial(v, L, rtol=1e-10, atol=1e-12):
    """Exact (to ODE tolerance) map for a radial potential, diagonal in degree.

    With f = r^l u the radial equation f'' + (2/r)f' - l(l+1)f/r^2 = v f
    becomes u'' + 2(l+1)/r u' = v u with u regular at 0; the boundary entry is
    f'(1)/f(1) = l + u'(1)/u(1).
    """
    if v.radial_profile is None:
        raise ValueError("dtn_radial needs a potential with a radial profile")
    prof = v.radial_profile
    diag = np.empty(basis_size(L))
    pos = 0
    for l in range(L + 1):
        def rhs(r, y, l=l):
            return [y[1], prof(r) * y[0] - 2.0 * (l + 1) / r * y[1]]

        # series start: u = 1 + v(0) r^2 / (2(2l+3)) + O(r^4)
        r0 = 1e-6
        u0 = 1.0 + prof(0.0) * r0 * r0 / (2.0 * (2 * l + 3))
        du0 = prof(0.0) * r0 / (2 * l + 3)
        sol = solve_ivp(rhs, (r0, 1.0), [u0, du0], method="DOP853",
                        rtol=rtol, atol=atol)
        if not sol.success:
            raise RuntimeError(f"radial ODE integration failed at degree {l}")
        u1, du1 = sol.y[0, -1], sol.y[1, -1]
        if abs(u1) < DIRICHLET_EIGENVALUE_FLOOR:
            raise RuntimeError(
                f"boundary value vanishes at degree {l}: zero is (numerically) "
                "a Dirichlet eigenvalue for this potential"
            )
        diag[pos:pos + 2 * l + 1] = l + du1 / u1
        pos += 2 * l + 1
    return DtNMap(matrix=np.diag(diag), L=L)


class _FdSystem:
    """Shortley-Weller discretization of -Delta u + v u = 0 in the unit ball.

    The matrix depends on the potential only, so it is assembled and
    factorized once; each boundary datum just produces a new right-hand side
    from the stored (row, coefficient, sphere point) boundary couplings.
    """

    def __init__(self, v_interp, n):
        axis = np.linspace(-1.0, 1.0, n)
        h = axis[1] - axis[0]
        X, Y, Z = np.meshgrid(axis, axis, axis, indexing="ij")
        R2 = X * X + Y * Y + Z * Z
        inside = R2 < 1.0 - 1e-12
        idx = -np.ones((n, n, n), dtype=int)
        ii, jj, kk = np.nonzero(inside)
        idx[ii, jj, kk] = np.arange(ii.size)
        n_unk = ii.size

        pts = np.stack([X[inside], Y[inside], Z[inside]], axis=-1)
        vvals = v_interp(pts)

        nbr_in = []    # per axis direction: neighbor index or -1
        nbr_leg = []   # per axis direction: leg length
        offsets = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0),
                   (0, 0, 1), (0, 0, -1)]
        for di, dj, dk in offsets:
            i2 = np.clip(ii + di, 0, n - 1)
            j2 = np.clip(jj + dj, 0, n - 1)
            k2 = np.clip(kk + dk, 0, n - 1)
            ok = inside[i2, j2, k2] & (np.abs(ii + di - i2) + np.abs(jj + dj - j2)
                                       + np.abs(kk + dk - k2) == 0)
            nb = np.where(ok, idx[i2, j2, k2], -1)
            e = np.array([di, dj, dk], dtype=float)
            bq = 2.0 * (pts @ e)
            t = (-bq + np.sqrt(bq * bq - 4.0 * (R2[inside] - 1.0))) / 2.0
            leg = np.where(ok, h, np.clip(t, 1e-3 * h, h))
            nbr_in.append(nb)
            nbr_leg.append(leg)

        rows_c, cols_c, vals_c = [], [], []
        diag = vvals.copy()
        b_rows, b_coefs, b_points = [], [], []
        for ax in range(3):
            hp, hm = nbr_leg[2 * ax], nbr_leg[2 * ax + 1]
            for sgn, nb, hh in ((+1, nbr_in[2 * ax], hp), (-1, nbr_in[2 * ax + 1], hm)):
                coef = 1.0 / (0.5 * hh * (hp + hm))
                diag += coef
                interior = nb >= 0
                rows_c.append(np.nonzero(interior)[0])
                cols_c.append(nb[interior])
                vals_c.append(-coef[interior])
                cut = np.nonzero(~interior)[0]
                if cut.size:
                    e = np.zeros(3)
                    e[ax] = sgn
                    xb = pts[cut] + hh[cut, None] * e
                    b_rows.append(cut)
                    b_coefs.append(coef[cut])
                    b_points.append(xb / np.linalg.norm(xb, axis=1, keepdims=True))
        rows = np.concatenate(rows_c + [np.arange(n_unk)])
        cols = np.concatenate(cols_c + [np.arange(n_unk)])
        vals = np.concatenate(vals_c + [diag])
        A = csr_matrix((vals, (rows, cols)), shape=(n_unk, n_unk))
        self.lu = splu(A.tocsc())
        self.axis = axis
        self.h = h
        self.inside = inside
        self.b_rows = np.concatenate(b_rows)
        self.b_coefs = np.concatenate(b_coefs)
        self.b_points = np.concatenate(b_points)
        self.n_unknowns = n_unk

    def solve(self, boundary_value):
        """Solution on the cube for boundary data g on the sphere.

        Exterior nodes are filled with g extended constantly along rays, so
        interpolation near the sphere stays boundary-consistent.
        """
        b = np.zeros(self.n_unknowns)
        np.add.at(b, self.b_rows, self.b_coefs * boundary_value(self.b_points))
        u = self.lu.solve(b)
        n = self.axis.size
        X, Y, Z = np.meshgrid(self.axis, self.axis, self.axis, indexing="ij")
        R = np.sqrt(X * X + Y * Y + Z * Z)
        outside = ~self.inside
        dirs = np.stack([X[outside], Y[outside], Z[outside]], axis=-1)
        dirs /= np.maximum(np.linalg.norm(dirs, axis=1, keepdims=True), 1e-300)
        full = np.empty((n, n, n))
        full[self.inside] = u
        full[outside] = boundary_value(dirs)
        return full


def dtn_general(v, L, resolution=32):
    """Coarse Cartesian FD map for a (possibly non-radial) potential.

    One interior Dirichlet solve per basis harmonic; the normal derivative at
    the sphere is a one-sided second-order radial difference using trilinear
    interpolation of the interior solution.  Accuracy is limited by the
    Shortley-Weller boundary treatment (first order near the sphere).
    """
    from .sphere import make_boundary_quadrature, real_sph_basis

    grid = v.grid
    vx = grid.axis
    v_interp = RegularGridInterpolator(
        (vx, vx, vx), v.values, bounds_error=False, fill_value=0.0
    )
    system = _FdSystem(v_interp, resolution)
    quad = make_boundary_quadrature(L)
    nodes = quad.nodes
    nb = basis_size(L)
    cols = np.empty((nb, nb))
    h = system.h
    for col in range(nb):
        ecol = np.zeros(nb)
        ecol[col] = 1.0

        def gfun(s, ecol=ecol):
            s = np.atleast_2d(s)
            th = np.arccos(np.clip(s[:, 2], -1.0, 1.0))
            ph = np.arctan2(s[:, 1], s[:, 0])
            return real_sph_basis(L, th, ph) @ ecol

        u = system.solve(gfun)
        ui = RegularGridInterpolator((system.axis,) * 3, u)
        g_b = gfun(nodes)
        u1 = ui(nodes * (1.0 - h))
        u2 = ui(nodes * (1.0 - 2.0 * h))
        du = (3.0 * g_b - 4.0 * u1 + u2) / (2.0 * h)
        cols[:, col] = quad.project(du)
    return DtNMap(matrix=cols, L=L)


def opnorm(matrix):
    """Spectral norm (largest singular value) of a DtN matrix or difference."""
    if isinstance(matrix, DtNMap):
        matrix = matrix.matrix
    return float(np.linalg.norm(np.asarray(matrix), 2))


def perturb(phi, noise):
    """phi + E with symmetric E, opnorm(E) = delta, deterministic in the seed."""
    e = noise.draw(basis_size(phi.L))
    return DtNMap(matrix=phi.matrix + e, L=phi.L)

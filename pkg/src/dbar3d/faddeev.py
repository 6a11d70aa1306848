"""Faddeev Green's function, complex-geometrical-optics solutions, and the
zero-energy scattering amplitude.

g(x,k) is the inverse transform of the symbol -1/(xi^2 + 2 k.xi) taken over
the half-cell-offset dual grid, so the symbol is never evaluated on its zero
set.  The CGO equation is solved in mu-form, mu = 1 + g * (v mu), with the
convolution applied spectrally on the same offset grid.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, lgmres

from .coords import ComplexMomentum, ThetaPoint
from .grids import offset_fft3, offset_ifft3

SYMBOL_FLOOR = 1e-8


def faddeev_symbol(k, grid):
    """-1/(xi^2 + 2 k.xi) on the offset dual grid; raises if the denominator
    comes too close to zero at this resolution."""
    xx, yy, zz = grid.dual_mesh()
    kv = k.vec
    denom = (xx * xx + yy * yy + zz * zz) + 2.0 * (kv[0] * xx + kv[1] * yy + kv[2] * zz)
    dmin = np.abs(denom).min()
    if dmin < SYMBOL_FLOOR:
        raise ValueError(
            f"Faddeev symbol nearly singular at this resolution (min |denom| = {dmin:.2e})"
        )
    return -1.0 / denom


def faddeev_g(k, grid):
    """g(x,k) sampled on the volume grid (G = e^{ikx} g assembled on demand)."""
    sym = faddeev_symbol(k, grid)
    return offset_ifft3(grid, sym)


def faddeev_g_at(k, grid, diffs, chunk=2048):
    """g(d,k) at arbitrary difference vectors d by direct symbol summation.

    Evaluates the same truncated offset-grid quadrature as faddeev_g but at
    off-grid points, via separable phase factors and a per-chunk tensor
    contraction.  diffs: (n, 3).
    """
    sym = faddeev_symbol(k, grid)
    xi = grid.dual_axis
    n = grid.n_per_axis
    dxi = np.pi / grid.half_width
    scale = dxi ** 3 / (2.0 * np.pi) ** 3
    diffs = np.atleast_2d(np.asarray(diffs, dtype=float))
    out = np.empty(diffs.shape[0], dtype=complex)
    M = sym.reshape(n, n * n)
    for i0 in range(0, diffs.shape[0], chunk):
        d = diffs[i0:i0 + chunk]
        pa = np.exp(1j * np.outer(d[:, 0], xi))
        pb = np.exp(1j * np.outer(d[:, 1], xi))
        pc = np.exp(1j * np.outer(d[:, 2], xi))
        t1 = (pa @ M).reshape(d.shape[0], n, n)
        t2 = np.einsum("dj,djl->dl", pb, t1)
        out[i0:i0 + chunk] = scale * np.einsum("dl,dl->d", pc, t2)
    return out


@dataclass
class CgoSolution:
    """mu(x,k) with psi = e^{ikx} mu, plus the final relative residual."""

    mu: np.ndarray
    k: ComplexMomentum
    residual: float
    iterations: int
    contraction: float


def _conv_op(grid, sym):
    def apply(f):
        return offset_ifft3(grid, sym * offset_fft3(grid, f))
    return apply


def solve_mu(v, k, tol=1e-10, max_iter=200):
    """Solve mu = 1 + g * (v mu) on the potential's grid.

    Stationary iteration while it contracts; falls back to LGMRES on the same
    discretized operator otherwise.
    """
    grid = v.grid
    sym = faddeev_symbol(k, grid)
    conv = _conv_op(grid, sym)
    vv = v.values

    mu = np.ones(vv.shape, dtype=complex)
    prev_res = None
    contraction = 0.0
    for it in range(1, max_iter + 1):
        nxt = 1.0 + conv(vv * mu)
        res = float(np.max(np.abs(nxt - mu)))
        mu = nxt
        if prev_res is not None and prev_res > 0:
            contraction = res / prev_res
        if res <= tol:
            return CgoSolution(mu=mu, k=k, residual=res, iterations=it,
                               contraction=contraction)
        if prev_res is not None and res > prev_res:
            break
        prev_res = res

    # Krylov fallback: (I - g* v .) mu = 1
    n3 = vv.size

    def matvec(x):
        m = x.reshape(vv.shape)
        return (m - conv(vv * m)).ravel()

    op = LinearOperator((n3, n3), matvec=matvec, dtype=complex)
    rhs = np.ones(n3, dtype=complex)
    sol, info = lgmres(op, rhs, x0=mu.ravel(), rtol=tol, atol=0.0, maxiter=max_iter)
    mu = sol.reshape(vv.shape)
    res = float(np.max(np.abs(mu - 1.0 - conv(vv * mu))))
    if info != 0 or res > max(tol * 100, 1e-6):
        raise RuntimeError(
            f"CGO solve did not converge (|Im k| = {k.rho:.3g} too small for this "
            f"potential/resolution; last contraction {contraction:.3f}, residual {res:.2e})"
        )
    return CgoSolution(mu=mu, k=k, residual=res, iterations=max_iter,
                       contraction=contraction)


def scattering_h(v, pt, sol=None, tol=1e-10):
    """h(k,l) = (2 pi)^{-3} int e^{-ilx} v(x) psi(x,k) dx by grid-cell sum."""
    if sol is None:
        sol = solve_mu(v, pt.k, tol=tol)
    grid = v.grid
    x, y, z = grid.mesh()
    kv = pt.k.vec
    lv = pt.l.vec
    # e^{-ilx} e^{ikx} = e^{i(k-l)x}
    ph = np.exp(1j * ((kv[0] - lv[0]) * x + (kv[1] - lv[1]) * y + (kv[2] - lv[2]) * z))
    integrand = ph * v.values * sol.mu
    return complex(integrand.sum() * grid.cell_volume / (2.0 * np.pi) ** 3)


def h_to_H(pt, value):
    """Relabel (k, l) -> (k, p = k - l); H(k, p) = h(k, k - p)."""
    return pt.k, pt.p, value


def H_to_h(k, p, value):
    lv = k.vec - p
    l = ComplexMomentum(lv.real, lv.imag)
    return ThetaPoint(k, l), value

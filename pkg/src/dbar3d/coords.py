"""Geometry of the zero-energy variety and its lambda-p coordinates.

k lives on Sigma = {k in C^3 : k.k = 0}; pairs (k, p) with p real and
p.p = 2 k.p form Omega.  For a fixed direction nu, each fiber over p is
parametrized by a nonzero complex scalar lambda.  The circles T_r and discs
D_r^+/- in the lambda plane encode the |Im k| = rho level sets, and xi(phi)
rotates Re k in the plane orthogonal to Im k.
"""

from dataclasses import dataclass, field

import numpy as np

from .constants import q_radius

TUBE_HALF_ANGLE = np.deg2rad(5.0)  # robust exclusion around the nu axis


@dataclass(frozen=True)
class ComplexMomentum:
    """k in C^3 with k.k = 0: |re| = |im| and re.im = 0."""

    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "re", np.asarray(self.re, dtype=float))
        object.__setattr__(self, "im", np.asarray(self.im, dtype=float))
        nr, ni = np.linalg.norm(self.re), np.linalg.norm(self.im)
        scale = max(nr, ni, 1.0)
        if abs(nr - ni) > 1e-10 * scale or abs(self.re @ self.im) > 1e-10 * scale ** 2:
            raise ValueError("k is not on the zero-energy variety (k^2 != 0)")

    @property
    def vec(self):
        return self.re + 1j * self.im

    @property
    def rho(self):
        return float(np.linalg.norm(self.im))


@dataclass(frozen=True)
class ThetaPoint:
    """(k, l) with Im k = Im l; p = k - l is then real."""

    k: ComplexMomentum
    l: ComplexMomentum

    def __post_init__(self):
        if np.linalg.norm(self.k.im - self.l.im) > 1e-10 * max(1.0, self.k.rho):
            raise ValueError("(k, l) requires Im k = Im l")

    @property
    def p(self):
        return self.k.re - self.l.re


@dataclass(frozen=True)
class Frame:
    """theta(p), omega(p) completing p/|p| to an oriented orthonormal triple."""

    nu: np.ndarray

    def __post_init__(self):
        nu = np.asarray(self.nu, dtype=float)
        if abs(np.linalg.norm(nu) - 1.0) > 1e-12:
            raise ValueError("nu must be a unit vector")
        object.__setattr__(self, "nu", nu)

    def _check(self, p):
        p = np.asarray(p, dtype=float)
        pn = np.linalg.norm(p)
        if pn == 0 or np.linalg.norm(np.cross(self.nu, p)) < 1e-14 * pn:
            raise ValueError("p on the excluded axis through nu")
        return p, pn

    def theta(self, p):
        p, _ = self._check(p)
        c = np.cross(self.nu, p)
        return c / np.linalg.norm(c)

    def omega(self, p):
        p, pn = self._check(p)
        return np.cross(p, self.theta(p)) / pn


def frame(nu):
    return Frame(np.asarray(nu, dtype=float))


def k_from_lambda(lam, p, f):
    """k = kappa1 theta + kappa2 omega + p/2 with kappa1 = i|p|(lam+1/lam)/4."""
    lam = complex(lam)
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    p = np.asarray(p, dtype=float)
    pn = np.linalg.norm(p)
    th, om = f.theta(p), f.omega(p)
    kappa1 = 1j * pn / 4.0 * (lam + 1.0 / lam)
    kappa2 = pn / 4.0 * (lam - 1.0 / lam)
    kvec = kappa1 * th + kappa2 * om + p / 2.0
    return ComplexMomentum(kvec.real, kvec.imag)


def lambda_from_k(k, p, f):
    """lam = 2 k.(theta + i omega) / (i |p|), inverse of k_from_lambda."""
    p = np.asarray(p, dtype=float)
    pn = np.linalg.norm(p)
    th, om = f.theta(p), f.omega(p)
    kv = k.vec if isinstance(k, ComplexMomentum) else np.asarray(k)
    return complex(2.0 * (kv @ (th + 1j * om)) / (1j * pn))


def lambda_from_kvec(kvec, p, f):
    return lambda_from_k(np.asarray(kvec), p, f)


def xi_rotation(lam, p, f, phi):
    """xi = Re k (cos phi - 1) + k_perp sin phi; k + xi stays on Sigma with Im k fixed."""
    k = k_from_lambda(lam, p, f)
    return xi_from_k(k, phi)


def xi_from_k(k, phi):
    im = k.im
    imn = np.linalg.norm(im)
    if imn == 0:
        raise ValueError("Im k must be nonzero")
    kperp = np.cross(im, k.re) / imn
    return k.re * (np.cos(phi) - 1.0) + kperp * np.sin(phi)


def canonical_theta_point(p, rho, f):
    """The distinguished (k, l) on the rho level with k - l = p.

    Re k = p/2 + eta theta(p), Im k = rho omega(p), eta = sqrt(rho^2 - |p|^2/4);
    in lambda coordinates this is lambda = i q(rho/|p|) on the T^+ ring.
    """
    p = np.asarray(p, dtype=float)
    pn = np.linalg.norm(p)
    if pn >= 2.0 * rho:
        raise ValueError("|p| must be below 2 rho")
    eta = np.sqrt(rho ** 2 - pn ** 2 / 4.0)
    th, om = f.theta(p), f.omega(p)
    k = ComplexMomentum(p / 2.0 + eta * th, rho * om)
    l = ComplexMomentum(-p / 2.0 + eta * th, rho * om)
    return ThetaPoint(k, l)


@dataclass(frozen=True)
class LambdaGrid:
    """Product discretization of the lambda annuli over a Cartesian p-grid.

    Per p, the plus branch covers the punctured disc |lambda| < q(rho/|p|)
    with log-radial levels t and uniform angles; the minus branch mirrors it
    at |lambda| > 1/q.  Both branches share the template Z: plus-branch nodes
    are q(rho/|p|) * Z, minus-branch nodes are Z^{-1} ... scaled by 1/q.
    p nodes outside the ball B_{2 tau rho} or inside the nu tube are masked.
    """

    rho: float
    tau: float
    nu: np.ndarray
    p_axis: np.ndarray           # 1D axis of the Cartesian p-grid
    n_radial: int
    n_angular: int
    log_span: float              # radial levels span q*exp(-log_span)..q

    def __post_init__(self):
        if not (0.0 < self.tau < 1.0):
            raise ValueError("tau must be in (0, 1)")
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.n_angular % 4 != 0:
            raise ValueError("n_angular must be a multiple of 4 (canonical node at angle pi/2)")

    @property
    def band_radius(self):
        return 2.0 * self.tau * self.rho

    @property
    def angles(self):
        """Uniform angles including -pi, 0, +pi/2."""
        n = self.n_angular
        return -np.pi + 2.0 * np.pi * np.arange(n) / n

    @property
    def radial_levels(self):
        """Template radii in (0, 1], level 0 innermost; ring itself is t=1."""
        ds = self.log_span / self.n_radial
        return np.exp(-(np.arange(self.n_radial) + 0.5)[::-1] * ds)

    def template(self):
        """Plus-branch node template Z (n_radial, n_angular); ring template is e^{i angles}."""
        r = self.radial_levels
        return r[:, None] * np.exp(1j * self.angles)[None, :]

    def p_mesh(self):
        a = self.p_axis
        return np.meshgrid(a, a, a, indexing="ij")

    def p_mask(self):
        """True where the p node is usable (inside band, outside the nu tube)."""
        px, py, pz = self.p_mesh()
        pn = np.sqrt(px * px + py * py + pz * pz)
        along = np.abs(px * self.nu[0] + py * self.nu[1] + pz * self.nu[2])
        with np.errstate(invalid="ignore", divide="ignore"):
            sin_angle = np.sqrt(np.maximum(0.0, 1.0 - (along / np.maximum(pn, 1e-300)) ** 2))
        in_tube = sin_angle < np.sin(TUBE_HALF_ANGLE)
        return (pn < self.band_radius) & (pn > 0) & ~in_tube

    def q_of_p(self, p_norm):
        """Ring radius q(rho/|p|) for these |p| (valid when |p| < 2 rho)."""
        return q_radius(self.rho / np.asarray(p_norm, dtype=float))


def build_lambda_grid(rho, tau, nu, n_p, n_radial, n_angular, log_span=4.0):
    """Cartesian p-grid with n_p (even) points per axis spanning the band."""
    if n_p < 2 or n_p % 2 != 0:
        raise ValueError("n_p must be even and >= 2 (avoids p = 0)")
    band = 2.0 * tau * rho
    # cell-centered so no node sits at p = 0 or exactly on the band sphere
    axis = (np.arange(n_p) - n_p / 2 + 0.5) * (2.0 * band / n_p)
    g = LambdaGrid(rho=float(rho), tau=float(tau), nu=np.asarray(nu, dtype=float),
                   p_axis=axis, n_radial=int(n_radial), n_angular=int(n_angular),
                   log_span=float(log_span))
    if not np.any(g.p_mask()):
        raise ValueError("empty lambda grid: no usable p nodes")
    return g

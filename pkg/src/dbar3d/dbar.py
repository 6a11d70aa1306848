"""Nonlinear Cauchy-Green machinery on the lambda annuli.

The scattering data on the rings generate H0 by Cauchy integrals; the field
is then completed into the annuli by the fixed point of U = H0 + M(U), where
M is an area (Cauchy-Green) operator applied to the quadratic bracket of the
field with itself.  The potential's Fourier transform is finally read off as
the lambda -> 0 (plus branch) and lambda -> infinity (minus branch) limits.

Node layout: per p, branch 0 covers |lambda| <= q(rho/|p|) with nodes
q * t_j e^{i angle_a} (t ascending, ring layer t = 1 last); branch 1 covers
|lambda| >= 1/q with nodes e^{i angle_a} / (q t_j).  Values are stored on the
full Cartesian p-cube, zero off the usable-p mask, so field evaluation at
bracket-shifted arguments is plain multilinear interpolation in
(log radial level, angle, px, py, pz).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .constants import q_radius
from .coords import LambdaGrid
from .norms import weighted_sup_values

T_CLIP_TOL = 1e-9


@dataclass
class ClipCounters:
    """Where bracket-shifted arguments left the computable region."""

    below_level: int = 0     # |lambda'| in the gap between the branches
    clamped_inner: int = 0   # radial level clamped to the innermost layer

    def merge(self, other):
        self.below_level += other.below_level
        self.clamped_inner += other.clamped_inner


@dataclass
class LambdaField:
    """Complex field on the two-branch lambda grid over the p-cube.

    values shape: (2, n_radial + 1, n_angular, n, n, n); radial index
    -1 is the ring layer (the boundary data), the rest the interior levels
    in ascending t.
    """

    grid: LambdaGrid
    values: np.ndarray

    def __post_init__(self):
        n = self.grid.p_axis.size
        want = (2, self.grid.n_radial + 1, self.grid.n_angular, n, n, n)
        if self.values.shape != want:
            raise ValueError(f"field shape {self.values.shape} != {want}")

    @classmethod
    def zeros(cls, grid):
        n = grid.p_axis.size
        return cls(grid, np.zeros(
            (2, grid.n_radial + 1, grid.n_angular, n, n, n), dtype=complex))

    def copy(self):
        return LambdaField(self.grid, self.values.copy())

    @property
    def ring(self):
        """Boundary layer, shape (2, n_angular, n, n, n)."""
        return self.values[:, -1]

    @property
    def interior(self):
        return self.values[:, :-1]

    def s_axis(self):
        """log t levels, interior ascending then the ring at 0."""
        return np.append(np.log(self.grid.radial_levels), 0.0)

    def interpolators(self):
        """One multilinear interpolator per branch over (s, angle, p).

        The angle axis is padded by one wrapped layer so interpolation is
        periodic; off-cube p reads as zero.
        """
        ang = self.grid.angles
        ang_pad = np.append(ang, ang[0] + 2.0 * np.pi)
        ax = self.grid.p_axis
        out = []
        for b in range(2):
            vals = np.concatenate(
                [self.values[b], self.values[b][:, :1]], axis=1)
            out.append(RegularGridInterpolator(
                (self.s_axis(), ang_pad, ax, ax, ax), vals,
                bounds_error=False, fill_value=0.0))
        return out

    def masked_p(self):
        mask = self.grid.p_mask()
        px, py, pz = self.grid.p_mesh()
        return mask, np.stack([px[mask], py[mask], pz[mask]], axis=-1)

    def norm(self, mu):
        """Weighted sup (1 + |p|)^mu |U| over usable p nodes, all layers."""
        mask, p_nodes = self.masked_p()
        pn = np.linalg.norm(p_nodes, axis=1)
        vals = self.values[..., mask]            # (2, nt+1, nang, n_mask)
        pn_b = np.broadcast_to(pn, vals.shape)
        return weighted_sup_values(vals.ravel(), pn_b.ravel(), mu)


@dataclass
class DbarSolveReport:
    iterations: int
    residual_history: list
    contraction_estimate: float
    extraction_spread: float
    converged: bool
    clips: ClipCounters = field(default_factory=ClipCounters)


@dataclass
class BandField:
    """Fourier-domain values at the usable p nodes of a lambda grid."""

    grid: LambdaGrid
    p_nodes: np.ndarray
    values: np.ndarray

    @property
    def band_radius(self):
        return self.grid.band_radius

    def p_norms(self):
        return np.linalg.norm(self.p_nodes, axis=1)

    def norm(self, mu):
        return weighted_sup_values(self.values, self.p_norms(), mu)


# --------------------------------------------------------------------------
# Cauchy ring integrals and area operators: per-p matrices are a scalar in
# q(rho/|p|) times fixed templates in the normalized coordinate z = lambda/q
# (plus branch) or w = q lambda (minus branch).

def cauchy_templates(grid):
    """Ring-to-interior Cauchy matrices, one per branch, q-independent.

    Plus:  H0(q z) = (dA/2pi) sum_j H_j e^{i a_j} / (e^{i a_j} - z).
    Minus: H0(w/q) = -(dA/2pi) sum_j H_j w / (e^{i a_j} - w).
    """
    ang = grid.angles
    dth = 2.0 * np.pi / grid.n_angular
    e = np.exp(1j * ang)
    t = grid.radial_levels
    zp = (t[:, None] * np.exp(1j * ang)[None, :]).ravel()
    wm = (np.exp(1j * ang)[None, :] / t[:, None]).ravel()
    cp = dth / (2.0 * np.pi) * e[None, :] / (e[None, :] - zp[:, None])
    cm = -dth / (2.0 * np.pi) * wm[:, None] / (e[None, :] - wm[:, None])
    return cp, cm


def area_templates(grid):
    """Interior-to-interior Cauchy-Green area matrices, one per branch.

    The physical operator at a p node is q * T_plus (resp. T_minus / q)
    applied to bracket values at the interior nodes; the diagonal cell is
    dropped (symmetric principal value on a centered polar cell).
    """
    ang = grid.angles
    dth = 2.0 * np.pi / grid.n_angular
    t = grid.radial_levels
    ds = grid.log_span / grid.n_radial
    edges = np.exp(np.append(np.log(t) - 0.5 * ds, 0.0))

    zp = (t[:, None] * np.exp(1j * ang)[None, :]).ravel()
    area_p = (0.5 * (edges[1:] ** 2 - edges[:-1] ** 2) * dth)
    area_p = np.repeat(area_p, grid.n_angular)
    with np.errstate(divide="ignore", invalid="ignore"):
        tp = -area_p[None, :] / (np.pi * (zp[None, :] - zp[:, None]))
    np.fill_diagonal(tp, 0.0)

    wm = (np.exp(1j * ang)[None, :] / t[:, None]).ravel()
    w_edges = 1.0 / edges
    area_m = (0.5 * np.abs(w_edges[:-1] ** 2 - w_edges[1:] ** 2) * dth)
    area_m = np.repeat(area_m, grid.n_angular)
    with np.errstate(divide="ignore", invalid="ignore"):
        tm = (-area_m[None, :] * wm[:, None]
              / (np.pi * wm[None, :] * (wm[None, :] - wm[:, None])))
    np.fill_diagonal(tm, 0.0)
    return tp, tm


def field_from_slice(sl):
    """Ring data only; interior zero (input state for cauchy_H0)."""
    f = LambdaField.zeros(sl.grid)
    mask = sl.grid.p_mask()
    where = np.nonzero(mask)
    for b in range(2):
        for j in range(sl.grid.n_angular):
            layer = np.zeros(mask.shape, dtype=complex)
            layer[where] = sl.values[:, b, j]
            f.values[b, -1, j] = layer
    return f


def cauchy_H0(sl):
    """Interior field from ring data by the branch Cauchy integrals."""
    f = field_from_slice(sl)
    cp, cm = cauchy_templates(sl.grid)
    mask = sl.grid.p_mask()
    where = np.nonzero(mask)
    nt, na = sl.grid.n_radial, sl.grid.n_angular
    interior_p = (cp @ sl.values[:, 0, :].T).T.reshape(-1, nt, na)
    interior_m = (cm @ sl.values[:, 1, :].T).T.reshape(-1, nt, na)
    for b, dat in ((0, interior_p), (1, interior_m)):
        for j in range(nt):
            for a in range(na):
                layer = np.zeros(mask.shape, dtype=complex)
                layer[where] = dat[:, j, a]
                f.values[b, j, a] = layer
    return f


# --------------------------------------------------------------------------
# The quadratic bracket.

def _frame_vectors(nu, p):
    """theta(p), omega(p) for an (N, 3) batch; NaN rows where p is unusable."""
    pn = np.linalg.norm(p, axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.cross(np.broadcast_to(nu, p.shape), p)
        th = c / np.linalg.norm(c, axis=-1, keepdims=True)
        om = np.cross(p, th) / pn
    return th, om


def _k_of(lam, p, nu):
    """Complex momentum vectors for (N,) lambda over (N, 3) p."""
    pn = np.linalg.norm(p, axis=-1)
    th, om = _frame_vectors(nu, p)
    kap1 = 1j * pn / 4.0 * (lam + 1.0 / lam)
    kap2 = pn / 4.0 * (lam - 1.0 / lam)
    return kap1[:, None] * th + kap2[:, None] * om + p / 2.0


def _lambda_of(kvec, p, nu):
    pn = np.linalg.norm(p, axis=-1)
    th, om = _frame_vectors(nu, p)
    with np.errstate(invalid="ignore", divide="ignore"):
        return 2.0 * np.einsum("nj,nj->n", kvec, th + 1j * om) / (1j * pn)


def _eval_field(interps, grid, lam, p, counters):
    """Field values at arbitrary (lambda, p); applies the band cutoff, the
    branch/level clipping, and the inner-level clamp."""
    out = np.zeros(lam.shape, dtype=complex)
    pn = np.linalg.norm(p, axis=-1)
    absl = np.abs(lam)
    ok = (pn < grid.band_radius) & (pn > 1e-12) & np.isfinite(absl) & (absl > 0)
    if not np.any(ok):
        return out
    q = q_radius(grid.rho / pn[ok])
    al = absl[ok]
    plus = al < 1.0
    t = np.where(plus, al / q, 1.0 / (al * q))
    below = t > 1.0 + T_CLIP_TOL
    counters.below_level += int(np.count_nonzero(below))
    t_min = grid.radial_levels[0]
    counters.clamped_inner += int(np.count_nonzero(t < t_min))
    t = np.clip(t, t_min, 1.0)
    s = np.log(t)
    theta = np.angle(lam[ok])
    pts = np.column_stack([s, theta, p[ok]])
    vals = np.where(plus, interps[0](pts), interps[1](pts))
    vals[below] = 0.0
    tmp = np.zeros(lam.shape, dtype=complex)
    tmp[ok] = vals
    out = tmp
    return out


def field_evaluator(U):
    """Closure evaluating a LambdaField at arbitrary (lambda, p) batches."""
    interps = U.interpolators()
    grid = U.grid

    def ev(lam, p, counters):
        return _eval_field(interps, grid, lam, p, counters)
    return ev


def bracket_batch(ev1, ev2, grid, lam, p, n_phi, counters, window=True):
    """{F1, F2} at a batch of (lambda, p) nodes; evi are evaluator callables
    (lam, p, counters) -> values.

    With window=True (the cutoff semantics of the area operator) the
    integrand vanishes outside |sin(phi/2)| < band/(2 |Re k|) and the
    quadrature is a midpoint rule on that per-node window; window=False
    covers all of [-pi, pi] for cutoff-free test fields.  The node count is
    even so phi = 0 (where the argument map degenerates but the weight
    vanishes) is never sampled.
    """
    if n_phi % 2 != 0:
        raise ValueError("n_phi must be even")
    nu = grid.nu
    pn = np.linalg.norm(p, axis=-1)
    absl = np.abs(lam)
    lb = np.conj(lam)
    kvec = _k_of(lam, p, nu)
    rek, imk = kvec.real, kvec.imag
    rn = np.linalg.norm(rek, axis=-1)
    kperp = np.cross(imk, rek) / np.maximum(
        np.linalg.norm(imk, axis=-1, keepdims=True), 1e-300)
    if window:
        phimax = 2.0 * np.arcsin(np.minimum(1.0, grid.band_radius / (2.0 * rn)))
    else:
        phimax = np.full(lam.shape, np.pi)
    dphi = 2.0 * phimax / n_phi

    total = np.zeros(lam.shape, dtype=complex)
    for m in range(n_phi):
        phi = phimax * (2 * m + 1 - n_phi) / n_phi
        cphi, sphi = np.cos(phi), np.sin(phi)
        xi = rek * (cphi - 1.0)[:, None] + kperp * sphi[:, None]
        w = -np.pi / 4.0 * (
            pn / 2.0 * (absl ** 2 - 1.0) / (lb * absl) * (cphi - 1.0)
            - pn / lb * sphi
        )
        lam1 = _lambda_of(kvec, -xi, nu)
        f1 = ev1(lam1, -xi, counters)
        k2 = kvec + xi
        p2 = p + xi
        lam2 = _lambda_of(k2, p2, nu)
        f2 = ev2(lam2, p2, counters)
        total += w * f1 * f2 * dphi
    return total


def bracket(F1, F2, lam, p, n_phi=16):
    """{F1, F2} at a single (lambda, p); returns (value, counters)."""
    counters = ClipCounters()
    val = bracket_batch(field_evaluator(F1), field_evaluator(F2), F1.grid,
                        np.atleast_1d(complex(lam)),
                        np.atleast_2d(np.asarray(p, dtype=float)),
                        n_phi, counters)
    return complex(val[0]), counters


# --------------------------------------------------------------------------
# The area operator and the fixed point.

def _interior_nodes(grid, p_nodes):
    """All interior (lambda, p) nodes, flattened as (n_mask, 2, nt, nang)."""
    t = grid.radial_levels
    e = np.exp(1j * grid.angles)
    qs = q_radius(grid.rho / np.linalg.norm(p_nodes, axis=1))
    zp = (t[:, None] * e[None, :])          # (nt, nang)
    lam_p = qs[:, None, None] * zp[None]
    lam_m = (e[None, :] / t[:, None])[None] / qs[:, None, None]
    lam = np.stack([lam_p, lam_m], axis=1)  # (n_mask, 2, nt, nang)
    pp = np.broadcast_to(p_nodes[:, None, None, None, :], lam.shape + (3,))
    return lam, pp


def area_op_M(U, n_phi=16, counters=None):
    """M(U): Cauchy-Green area integral of the self-bracket of U."""
    if counters is None:
        counters = ClipCounters()
    grid = U.grid
    mask, p_nodes = U.masked_p()
    where = np.nonzero(mask)
    lam, pp = _interior_nodes(grid, p_nodes)
    ev = field_evaluator(U)
    W = bracket_batch(ev, ev, grid, lam.ravel(),
                      pp.reshape(-1, 3), n_phi, counters)
    nt, na = grid.n_radial, grid.n_angular
    W = W.reshape(-1, 2, nt * na)
    tp, tm = area_templates(grid)
    qs = q_radius(grid.rho / np.linalg.norm(p_nodes, axis=1))
    mp = qs[:, None] * (W[:, 0] @ tp.T)
    mm = (W[:, 1] @ tm.T) / qs[:, None]
    out = LambdaField.zeros(grid)
    for b, dat in ((0, mp), (1, mm)):
        dd = dat.reshape(-1, nt, na)
        for j in range(nt):
            for a in range(na):
                layer = np.zeros(mask.shape, dtype=complex)
                layer[where] = dd[:, j, a]
                out.values[b, j, a] = layer
    return out


def solve_H(H0, tol=1e-8, max_iter=30, n_phi=16):
    """Fixed point U = H0 + M(U) by successive approximation from U0 = H0.

    The ring layer carries the boundary data and is held fixed.  Returns the
    last iterate and a report; non-convergence is flagged, not raised (the
    caller sees the contraction estimate >= 1).
    """
    counters = ClipCounters()
    U = H0.copy()
    history = []
    contraction = 0.0
    converged = False
    for it in range(1, max_iter + 1):
        MU = area_op_M(U, n_phi=n_phi, counters=counters)
        new_vals = H0.values + MU.values
        new_vals[:, -1] = H0.values[:, -1]
        res = float(np.max(np.abs(new_vals - U.values)))
        history.append(res)
        U = LambdaField(H0.grid, new_vals)
        if len(history) >= 2 and history[-2] > 0:
            contraction = history[-1] / history[-2]
        if res <= tol:
            converged = True
            break
        if len(history) >= 3 and history[-1] > history[-2] > history[-3]:
            break
    vp = extract_vhat(U, "plus")
    vm = extract_vhat(U, "minus")
    spread = weighted_sup_values(vp.values - vm.values, vp.p_norms(), 2.0)
    report = DbarSolveReport(
        iterations=len(history), residual_history=history,
        contraction_estimate=contraction, extraction_spread=spread,
        converged=converged, clips=counters)
    return U, report


def extract_vhat(U, branch):
    """v-hat at the usable p nodes by extrapolating the angle-averaged field
    along the three innermost radial layers to t -> 0 (lambda -> 0 on the
    plus branch, lambda -> infinity on the minus branch)."""
    if branch not in ("plus", "minus"):
        raise ValueError("branch must be 'plus' or 'minus'")
    if U.grid.n_radial < 3:
        raise ValueError("need at least 3 radial layers for extraction")
    b = 0 if branch == "plus" else 1
    mask, p_nodes = U.masked_p()
    t = U.grid.radial_levels[:3]
    layers = U.values[b, :3][..., mask]       # (3, nang, n_mask)
    means = layers.mean(axis=1)               # (3, n_mask)
    coef = np.polyfit(t, means, 2)
    vals = coef[-1]
    return BandField(grid=U.grid, p_nodes=p_nodes, values=vals)


def naive_vhat(sl):
    """The single-point approximation: h at the distinguished ring node
    (plus branch, angle pi/2, where lambda = i q(rho/|p|))."""
    j = sl.canonical_angle_index
    if not np.all(sl.valid[:, 0, j]):
        raise ValueError("canonical ring node missing for some p")
    return BandField(grid=sl.grid, p_nodes=sl.p_nodes.copy(),
                     values=sl.values[:, 0, j].copy())


def discrete_dbar(values, radii, angles):
    """d/d(conj lambda) on a polar grid by central differences.

    values: (n_r, n_ang) samples at radii[j] e^{i angles[a]}; returns the
    same shape (edge radial rows one-sided).  Used as the consistency
    diagnostic against the bracket.
    """
    values = np.asarray(values, dtype=complex)
    r = np.asarray(radii, dtype=float)
    dth = angles[1] - angles[0]
    dv_r = np.gradient(values, r, axis=0, edge_order=2)
    dv_th = (np.roll(values, -1, axis=1) - np.roll(values, 1, axis=1)) / (2 * dth)
    eith = np.exp(1j * angles)[None, :]
    return 0.5 * eith * (dv_r + 1j * dv_th / r[:, None])

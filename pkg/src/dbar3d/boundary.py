"""From boundary data to scattering data.

The scattering amplitude h(k,l) is recovered from the Dirichlet-to-Neumann
map of -Delta + v against the zero-potential background: the boundary trace
of the generalized scattering solution solves a Fredholm equation whose
kernel composes the Faddeev Green's function G with the DtN difference, and
h is then a double boundary integral of the same difference kernel.

A ScatteringSlice collects h on the lambda rings of every p node of a
LambdaGrid; it can be filled either through the DtN route (the inverse
problem's data) or directly from volume solves (the exact-data route used
by the decay experiments, where thousands of nodes are needed).
"""

from dataclasses import dataclass

import numpy as np

from .coords import ComplexMomentum, LambdaGrid, ThetaPoint, frame, k_from_lambda
from .faddeev import faddeev_g_at, scattering_h, solve_mu

CONDITION_LIMIT = 1e12
FOURIER_NORM = 1.0 / (2.0 * np.pi) ** 3


@dataclass(frozen=True)
class BoundaryKernel:
    """Nystrom matrix of the boundary integral operator at momentum k.

    matrix[a, b] = w_b * A(x_a, y_b) with A(x, y) = int G(x-z, k) dPhi(z, y) dz,
    so that (matrix @ f) is the quadrature of int A(x, y) f(y) dy.
    """

    matrix: np.ndarray
    k: ComplexMomentum


def dtn_difference_kernel(phi_v, phi_0, quad):
    """Schwartz-kernel samples of Phi_v - Phi_0 between quadrature nodes."""
    return quad.basis @ (phi_v.matrix - phi_0.matrix) @ quad.basis.T


def kernel_A(phi_v, phi_0, k, quad, grid):
    """Compose G(x - z, k) with the DtN difference kernel over the sphere."""
    K = dtn_difference_kernel(phi_v, phi_0, quad)
    n = quad.n_nodes
    diffs = (quad.nodes[:, None, :] - quad.nodes[None, :, :]).reshape(-1, 3)
    g = faddeev_g_at(k, grid, diffs).reshape(n, n)
    phase = np.exp(1j * (quad.nodes @ k.vec))
    G = phase[:, None] * g / phase[None, :]
    A = (G * quad.weights[None, :]) @ K
    return BoundaryKernel(matrix=A * quad.weights[None, :], k=k)


def solve_boundary_psi(kernel, k, quad):
    """Boundary trace of the scattering solution: (I - A) psi = e^{ikx}."""
    psi1 = np.exp(1j * (quad.nodes @ k.vec))
    system = np.eye(quad.n_nodes, dtype=complex) - kernel.matrix
    cond = np.linalg.cond(system)
    if cond > CONDITION_LIMIT:
        raise RuntimeError(
            f"boundary system ill-conditioned (cond = {cond:.2e}); "
            "|Im k| too small at this discretization or Dirichlet-eigenvalue issue"
        )
    return np.linalg.solve(system, psi1)


def h_from_dtn(phi_v, phi_0, pt, quad, grid, kernel=None, psi=None):
    """h(k,l) from DtN data by double boundary quadrature.

    h = (2 pi)^{-3} int int e^{-ilx} dPhi(x,y) psi(y,k) dy dx; the kernel and
    psi solve may be passed in to share work across l at fixed k.
    """
    if kernel is None:
        kernel = kernel_A(phi_v, phi_0, pt.k, quad, grid)
    if psi is None:
        psi = solve_boundary_psi(kernel, pt.k, quad)
    K = dtn_difference_kernel(phi_v, phi_0, quad)
    left = quad.weights * np.exp(-1j * (quad.nodes @ pt.l.vec))
    return complex(FOURIER_NORM * (left @ (K @ (quad.weights * psi))))


@dataclass
class ScatteringSlice:
    """h on the lambda rings of every usable p node of a LambdaGrid.

    values[i, 0, j] is h at p_nodes[i], plus-branch ring node
    q(rho/|p|) e^{i angle_j}; values[i, 1, j] the minus-branch node
    (1/q) e^{i angle_j}.  valid marks nodes whose solve succeeded.
    """

    grid: LambdaGrid
    p_nodes: np.ndarray        # (n_p, 3)
    values: np.ndarray         # (n_p, 2, n_angular) complex
    valid: np.ndarray          # same shape, bool
    route: str                 # "dtn" or "direct"

    def __post_init__(self):
        npn = self.p_nodes.shape[0]
        if self.values.shape != (npn, 2, self.grid.n_angular):
            raise ValueError("values shape does not match the lambda grid")

    @property
    def rho(self):
        return self.grid.rho

    def ring_lambdas(self, i):
        """The (2, n_angular) lambda nodes over p_nodes[i]."""
        q = self.grid.q_of_p(np.linalg.norm(self.p_nodes[i]))
        e = np.exp(1j * self.grid.angles)
        return np.stack([q * e, e / q])

    def theta_points(self, i):
        """(k, l) for every ring node over p_nodes[i], same layout as values."""
        f = frame(self.grid.nu)
        p = self.p_nodes[i]
        out = []
        for row in self.ring_lambdas(i):
            pts = []
            for lam in row:
                k = k_from_lambda(lam, p, f)
                lv = k.vec - p
                pts.append(ThetaPoint(k, ComplexMomentum(lv.real, lv.imag)))
            out.append(pts)
        return out

    @property
    def canonical_angle_index(self):
        """Ring index of angle pi/2, where the plus-branch node is i q (the
        distinguished point with Re k = p/2 + eta theta, Im k = rho omega)."""
        return 3 * self.grid.n_angular // 4


def _slice_skeleton(lgrid, route):
    px, py, pz = lgrid.p_mesh()
    mask = lgrid.p_mask()
    p_nodes = np.stack([px[mask], py[mask], pz[mask]], axis=-1)
    shape = (p_nodes.shape[0], 2, lgrid.n_angular)
    return ScatteringSlice(
        grid=lgrid,
        p_nodes=p_nodes,
        values=np.zeros(shape, dtype=complex),
        valid=np.zeros(shape, dtype=bool),
        route=route,
    )


def h_on_slice(phi_v, phi_0, lgrid, quad, grid, verbose=False):
    """Fill a ScatteringSlice through the DtN route.

    One kernel assembly + boundary solve per distinct k (cached); failures
    are recorded in the validity mask instead of aborting the slice.
    """
    sl = _slice_skeleton(lgrid, "dtn")
    cache = {}
    for i in range(sl.p_nodes.shape[0]):
        for b, row in enumerate(sl.theta_points(i)):
            for j, pt in enumerate(row):
                key = (pt.k.re.tobytes(), pt.k.im.tobytes())
                try:
                    if key not in cache:
                        kern = kernel_A(phi_v, phi_0, pt.k, quad, grid)
                        cache[key] = (kern, solve_boundary_psi(kern, pt.k, quad))
                    kern, psi = cache[key]
                    sl.values[i, b, j] = h_from_dtn(
                        phi_v, phi_0, pt, quad, grid, kernel=kern, psi=psi
                    )
                    sl.valid[i, b, j] = True
                except (RuntimeError, ValueError):
                    pass
        if verbose:
            print(f"  p node {i + 1}/{sl.p_nodes.shape[0]} done")
    return sl


def scattering_slice_direct(v, lgrid, tol=1e-8, verbose=False):
    """Fill a ScatteringSlice from volume solves (exact scattering data)."""
    sl = _slice_skeleton(lgrid, "direct")
    for i in range(sl.p_nodes.shape[0]):
        for b, row in enumerate(sl.theta_points(i)):
            for j, pt in enumerate(row):
                try:
                    sl.values[i, b, j] = scattering_h(
                        v, pt, solve_mu(v, pt.k, tol=tol)
                    )
                    sl.valid[i, b, j] = True
                except (RuntimeError, ValueError):
                    pass
        if verbose:
            print(f"  p node {i + 1}/{sl.p_nodes.shape[0]} done")
    return sl

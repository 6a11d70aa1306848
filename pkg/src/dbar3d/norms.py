"""Grid-sampled surrogates for the W^{m,1} and weighted-sup norms."""

import numpy as np


def sobolev_norm_m1(v, m):
    """max over |J| <= m of the L1 norm of central finite differences.

    Metadata-quality only: second-order central differences on the potential's
    own grid, grid-sum quadrature for L1.
    """
    if m > v.m:
        raise ValueError("requested order exceeds the potential's smoothness metadata")
    h = v.grid.spacing
    vol = v.grid.cell_volume

    best = 0.0
    for jx in range(m + 1):
        for jy in range(m + 1 - jx):
            for jz in range(m + 1 - jx - jy):
                d = v.values
                for axis, order in ((0, jx), (1, jy), (2, jz)):
                    for _ in range(order):
                        d = np.gradient(d, h, axis=axis, edge_order=2)
                best = max(best, float(np.sum(np.abs(d)) * vol))
    return best


def weighted_sup_values(values, p_norms, mu):
    """Discrete sup of (1+|p|)^mu |u(p)| over listed nodes."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    values = np.asarray(values)
    p_norms = np.asarray(p_norms, dtype=float)
    if values.size == 0:
        return 0.0
    return float(np.max((1.0 + p_norms) ** mu * np.abs(values)))


def weighted_sup_norm(u, mu):
    """Discrete sup of (1+|p|)^mu |u(p)| for a FrequencyField on its dual grid."""
    px, py, pz = u.grid.dual_mesh()
    pn = np.sqrt(px * px + py * py + pz * pz)
    return weighted_sup_values(u.values.ravel(), pn.ravel(), mu)

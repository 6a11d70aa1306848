"""Numeric constants entering the boundary Cauchy-integral estimates."""

import numpy as np
from scipy.optimize import minimize_scalar


def q_radius(r):
    """Radius of the small circle T_r^+: q(r) = 2r(1 - sqrt(1 - 1/(4r^2))).

    q(r) and 1/q(r) are the two roots of s + 1/s = 4r; q is strictly
    decreasing on (1/2, inf) with q -> 1 as r -> 1/2+.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.5):
        raise ValueError("q_radius requires r > 1/2")
    return 2.0 * r * (1.0 - np.sqrt(1.0 - 1.0 / (4.0 * r * r)))


def c6_constant(r_max=1e6):
    """sup over r in (1/2, r_max] of q(r)/(q(r) - q(2r)).

    The ratio tends to its supremum as r -> inf (the tail is monotone), and
    the value is bounded by (2 sqrt(3) - 3)^{-1}.
    """
    def neg_ratio(r):
        return -q_radius(r) / (q_radius(r) - q_radius(2.0 * r))

    res = minimize_scalar(neg_ratio, bounds=(0.5 + 1e-9, r_max), method="bounded")
    # guard against the optimizer stopping short of the monotone tail
    tail = np.geomspace(1.0, r_max, 200)
    best = np.max(q_radius(tail) / (q_radius(tail) - q_radius(2.0 * tail)))
    return max(-res.fun, float(best))

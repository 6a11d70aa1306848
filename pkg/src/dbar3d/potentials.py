"""Reference potentials for experiments and tests."""

import numpy as np

from .grids import Potential


def poly_bump_profile(amplitude=8.0, radius=0.9, power=4):
    """A (1 - (r/R)^2)^power bump: C^{power-1} across r = R, supported there."""
    def profile(r):
        r = np.asarray(r, dtype=float)
        u = np.clip(r / radius, 0.0, 1.0)
        return amplitude * (1.0 - u * u) ** power
    return profile


def smooth_bump_profile(amplitude=8.0, radius=0.9):
    """The C-infinity bump amplitude * exp(1 - 1/(1 - (r/R)^2))."""
    def profile(r):
        r = np.asarray(r, dtype=float)
        u2 = np.minimum((r / radius) ** 2, 1.0)
        with np.errstate(divide="ignore", over="ignore"):
            out = amplitude * np.exp(1.0 - 1.0 / np.maximum(1.0 - u2, 1e-300))
        return np.where(u2 >= 1.0, 0.0, out)
    return profile


def gaussian_profile(amplitude=8.0, width=0.25, radius=0.95):
    """Truncated Gaussian amplitude * e^{-r^2 / (2 width^2)} for r < radius."""
    def profile(r):
        r = np.asarray(r, dtype=float)
        return np.where(r < radius,
                        amplitude * np.exp(-r * r / (2.0 * width * width)), 0.0)
    return profile


def reference_bump(grid, amplitude=8.0, radius=0.9, power=4):
    """The default experiment potential: a poly bump, smoothness order power."""
    return Potential.from_radial(
        grid, poly_bump_profile(amplitude, radius, power), m=power)

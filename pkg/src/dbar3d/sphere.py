"""Boundary quadrature on the unit sphere and a real spherical-harmonic basis.

The quadrature is a product rule: Gauss-Legendre in cos(theta) times uniform
in phi, exact for spherical harmonics through degree 2L.  DtN matrices act on
coefficients in the real orthonormal basis, ordered (l, m) with
l = 0..L and m = -l..l.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import sph_harm_y


def basis_size(L):
    return (L + 1) ** 2


def basis_degrees(L):
    """Degree l of each basis function, length (L+1)^2."""
    return np.concatenate([np.full(2 * l + 1, l) for l in range(L + 1)])


def real_sph_basis(L, theta, phi):
    """Matrix of real orthonormal spherical harmonics at the given angles.

    Returns shape (npoints, (L+1)^2).
    """
    theta = np.atleast_1d(theta)
    phi = np.atleast_1d(phi)
    cols = []
    for l in range(L + 1):
        # scipy's sph_harm_y(l, m, theta, phi): theta is the polar angle
        ylm = {m: sph_harm_y(l, abs(m), theta, phi) for m in range(l + 1)}
        for m in range(-l, l + 1):
            if m < 0:
                cols.append(np.sqrt(2.0) * (-1) ** m * ylm[-m].imag)
            elif m == 0:
                cols.append(ylm[0].real)
            else:
                cols.append(np.sqrt(2.0) * (-1) ** m * ylm[m].real)
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class BoundaryQuadrature:
    """Nodes/weights on the unit sphere with a harmonic cutoff L."""

    nodes: np.ndarray      # (n, 3) unit vectors
    weights: np.ndarray    # (n,), sums to 4 pi
    max_degree: int
    basis: np.ndarray      # (n, (L+1)^2) real harmonics at the nodes

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    def project(self, f):
        """Harmonic coefficients of boundary samples f (may be complex)."""
        return (self.basis * self.weights[:, None]).T @ np.asarray(f)

    def evaluate(self, coeffs):
        """Boundary samples from harmonic coefficients."""
        return self.basis @ np.asarray(coeffs)


def make_boundary_quadrature(L):
    if L < 0:
        raise ValueError("L must be >= 0")
    n_theta = L + 1
    n_phi = 2 * L + 2
    ct, wt = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(ct)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    wphi = 2.0 * np.pi / n_phi

    TH, PH = np.meshgrid(theta, phi, indexing="ij")
    W = np.outer(wt, np.full(n_phi, wphi))
    th = TH.ravel()
    ph = PH.ravel()
    nodes = np.stack(
        [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1
    )
    basis = real_sph_basis(L, th, ph)
    return BoundaryQuadrature(nodes=nodes, weights=W.ravel(), max_degree=L, basis=basis)

"""Zonal spectral calculus on the unit sphere (numerical N in {2, 3}).

Fields are expanded in the zonal eigenbasis of the Laplace-Beltrami
operator, orthonormal for the uniform probability measure: the cosine
basis on the circle, normalized Legendre polynomials in t = cos(phi) on
the 2-sphere.  Degree ell carries eigenvalue ell(ell + N - 2), so the
angular Dirichlet energy is the plain weighted coefficient sum and never
requires assembling rotation generators.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import eval_legendre

from .errors import DomainError

__all__ = [
    "Q_CAP",
    "SphereQuadrature",
    "ZonalField",
    "sphere_quadrature",
    "basis_matrix",
    "nodal_values",
    "field_from_nodal",
    "grad_energy",
    "poincare_deficit",
    "holder_probability_deficit",
    "zonal_field_json",
    "zonal_field_from_json",
]

# For N <= 3 the admissible exponent window (1, (N+1)/(N-3)] of the sharp
# sphere inequality is unbounded; q is capped here for numerical stability.
Q_CAP = 10.0


@dataclass(frozen=True)
class SphereQuadrature:
    """Nodes and weights for the uniform probability measure.

    N = 2: uniform angles on the circle (exact for trig degree <= exactness).
    N = 3: Gauss-Legendre in t = cos(phi) (exact for poly degree <= exactness).
    Weights sum to 1.
    """

    N: int
    nodes: np.ndarray
    weights: np.ndarray
    exactness: int


def sphere_quadrature(N: int, m: int) -> SphereQuadrature:
    """Build an m-node quadrature on the sphere for N in {2, 3}."""
    if N == 2:
        if m < 2:
            raise DomainError(f"need m >= 2 nodes, got {m}")
        nodes = 2.0 * math.pi * np.arange(m) / m
        weights = np.full(m, 1.0 / m)
        return SphereQuadrature(N=2, nodes=nodes, weights=weights, exactness=m - 1)
    if N == 3:
        if m < 1:
            raise DomainError(f"need m >= 1 nodes, got {m}")
        t, w = leggauss(m)
        return SphereQuadrature(N=3, nodes=t, weights=w / 2.0, exactness=2 * m - 1)
    raise DomainError(f"numerical sphere operations support N in {{2, 3}}, got N={N}")


@dataclass(frozen=True)
class ZonalField:
    """Zonal field on S^(N-1) by coefficients in the orthonormal eigenbasis."""

    N: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.N not in (2, 3):
            raise DomainError(f"numerical sphere operations support N in {{2, 3}}, got N={self.N}")
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size < 1:
            raise DomainError("coeffs must be a non-empty 1-d array")
        object.__setattr__(self, "coeffs", c)

    @property
    def L_max(self) -> int:
        return self.coeffs.size - 1

    def eigenvalues(self) -> np.ndarray:
        ell = np.arange(self.coeffs.size)
        return ell * (ell + self.N - 2)


def basis_matrix(quad: SphereQuadrature, L_max: int) -> np.ndarray:
    """Orthonormal basis sampled at the quadrature nodes, shape (m, L_max+1)."""
    if L_max < 0:
        raise DomainError(f"need L_max >= 0, got {L_max}")
    m = quad.nodes.size
    B = np.empty((m, L_max + 1))
    B[:, 0] = 1.0
    if quad.N == 2:
        for ell in range(1, L_max + 1):
            B[:, ell] = math.sqrt(2.0) * np.cos(ell * quad.nodes)
    else:
        for ell in range(1, L_max + 1):
            B[:, ell] = math.sqrt(2 * ell + 1.0) * eval_legendre(ell, quad.nodes)
    return B


def default_quadrature(N: int, L_max: int) -> SphereQuadrature:
    """Quadrature comfortably exact for products and powers up to ~4 L_max."""
    return sphere_quadrature(N, max(4 * L_max + 8, 32))


def nodal_values(v: ZonalField, quad: SphereQuadrature) -> np.ndarray:
    return basis_matrix(quad, v.L_max) @ v.coeffs


def field_from_nodal(values: np.ndarray, quad: SphereQuadrature, L_max: int, N: int) -> ZonalField:
    """Project nodal samples onto the zonal basis up to degree L_max."""
    B = basis_matrix(quad, L_max)
    coeffs = B.T @ (quad.weights * np.asarray(values, dtype=float))
    return ZonalField(N=N, coeffs=coeffs)


def grad_energy(v: ZonalField) -> float:
    """Angular Dirichlet energy: sum of ell(ell + N - 2) c_ell^2."""
    return float(np.sum(v.eigenvalues() * v.coeffs**2))


def _check_q(q: float, N: int) -> None:
    if q <= 1:
        raise DomainError(f"need q > 1, got q={q}")
    if q > Q_CAP:
        raise DomainError(f"q={q} above the numerical cap {Q_CAP}")


def poincare_deficit(v: ZonalField, q: float, quad: SphereQuadrature | None = None) -> float:
    """Deficit of the sharp subcritical sphere inequality at exponent q.

    (q-1)/(N-1) * grad_energy(v) - (int |v|^(q+1))^(2/(q+1)) + int v^2,
    non-negative for every field, vanishing to fourth order in the size of
    a degree-1 perturbation of a constant (the constant is sharp there).
    Nodal values pass through |.| before the fractional power.
    """
    _check_q(q, v.N)
    if quad is None:
        quad = default_quadrature(v.N, v.L_max)
    vals = np.abs(nodal_values(v, quad))
    int_q1 = float(np.sum(quad.weights * vals ** (q + 1)))
    int_2 = float(np.sum(v.coeffs**2))
    return (q - 1) / (v.N - 1) * grad_energy(v) - int_q1 ** (2.0 / (q + 1)) + int_2


def holder_probability_deficit(v: ZonalField, q: float, quad: SphereQuadrature | None = None) -> float:
    """Deficit (int |v|^(q+1))^(2/(q+1)) - int v^2 of the probability-measure
    power-mean inequality; zero iff |v| is constant."""
    if q <= 1:
        raise DomainError(f"need q > 1, got q={q}")
    if quad is None:
        quad = default_quadrature(v.N, v.L_max)
    vals = np.abs(nodal_values(v, quad))
    int_q1 = float(np.sum(quad.weights * vals ** (q + 1)))
    int_2 = float(np.sum(v.coeffs**2))
    return int_q1 ** (2.0 / (q + 1)) - int_2


def zonal_field_json(v: ZonalField) -> str:
    return json.dumps({"N": v.N, "L_max": v.L_max, "coeffs": v.coeffs.tolist()})


def zonal_field_from_json(text: str) -> ZonalField:
    obj = json.loads(text)
    coeffs = np.asarray(obj["coeffs"], dtype=float)
    if coeffs.size != obj["L_max"] + 1:
        raise DomainError("inconsistent L_max and coeffs length")
    return ZonalField(N=int(obj["N"]), coeffs=coeffs)

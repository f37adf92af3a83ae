"""Hermite zeros, Gauss-Hermite rules, and tensor-product cubature.

Zeros come from the symmetric tridiagonal (Jacobi matrix) eigenproblem and
are then polished by Newton iteration on the normalized recurrence.  Weights
are computed through the Christoffel function 1/K_n at the nodes, which is
overflow-free at any order the degree cap allows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import hermite_core
from .errors import (
    DimensionMismatchError,
    InvalidDegreeError,
    NumericFailureError,
    ResourceError,
)

DEFAULT_NODE_BUDGET = 10**7

_NEWTON_MAX_ITER = 100
_NEWTON_TOL = 1e-14


@dataclass(frozen=True)
class QuadratureRule1D:
    """Gauss-Hermite rule: zeros of H_n with both weight normalizations.

    ``gauss_weights`` integrate p(t)*exp(-t^2); ``christoffel_weights`` are
    1/K_n at the nodes and integrate products of normalized Hermite
    functions directly (the exp(-t^2) factor is already inside them).
    All weights are strictly positive in exact arithmetic; edge gauss
    weights underflow the double range for n beyond roughly 330.
    """

    n: int
    nodes: np.ndarray
    gauss_weights: np.ndarray
    christoffel_weights: np.ndarray


@dataclass(frozen=True)
class CubatureRule:
    """Tensor-product rule exact for f*g with f in V_l, g in V_m, l+m <= 2n-1."""

    d: int
    base: QuadratureRule1D
    nodes: np.ndarray  # (n**d, d)
    weights: np.ndarray  # (n**d,)


def _newton_polish(n: int, t: np.ndarray) -> np.ndarray:
    """Newton-polish approximate zeros of H_n; ratio h_n/h_n' is scale-free."""
    t = t.copy()
    for _ in range(_NEWTON_MAX_ITER):
        p_nm1, p_n, _ = hermite_core._scaled_state(n, t)
        p_np1 = t * math.sqrt(2.0 / (n + 1)) * p_n - math.sqrt(n / (n + 1.0)) * p_nm1
        deriv = -math.sqrt((n + 1) / 2.0) * p_np1 + math.sqrt(n / 2.0) * p_nm1
        step = p_n / deriv
        t -= step
        if np.all(np.abs(step) <= _NEWTON_TOL * (1.0 + np.abs(t))):
            break
    else:
        raise NumericFailureError(
            f"Newton polish for Hermite zeros (n={n}) did not converge "
            f"in {_NEWTON_MAX_ITER} iterations"
        )
    return t


@lru_cache(maxsize=128)
def _zeros_cached(n: int) -> np.ndarray:
    if n == 1:
        return np.zeros(1)
    off_diag = np.sqrt(np.arange(1, n) / 2.0)
    approx = eigh_tridiagonal(
        np.zeros(n), off_diag, eigvals_only=True, lapack_driver="sterf"
    )
    zeros = _newton_polish(n, approx)
    zeros = 0.5 * (zeros - zeros[::-1])  # enforce exact symmetry
    if n % 2 == 1:
        zeros[n // 2] = 0.0
    zeros.setflags(write=False)
    return zeros


def hermite_zeros(n: int) -> np.ndarray:
    """Ascending zeros of the Hermite polynomial H_n."""
    if n < 1 or n > hermite_core.DEGREE_CAP:
        raise InvalidDegreeError(f"order {n} outside [1, {hermite_core.DEGREE_CAP}]")
    return _zeros_cached(n)


@lru_cache(maxsize=64)
def _rule_cached(n: int) -> QuadratureRule1D:
    nodes = _zeros_cached(n)
    lam = 1.0 / hermite_core.kernel_diag(n, nodes)
    gauss = lam * np.exp(-nodes * nodes)
    lam.setflags(write=False)
    gauss.setflags(write=False)
    return QuadratureRule1D(
        n=n, nodes=nodes, gauss_weights=gauss, christoffel_weights=lam
    )


def gauss_hermite_rule(n: int) -> QuadratureRule1D:
    """n-point Gauss-Hermite rule, exact for polynomials of degree 2n-1."""
    if n < 1 or n > hermite_core.DEGREE_CAP:
        raise InvalidDegreeError(f"order {n} outside [1, {hermite_core.DEGREE_CAP}]")
    return _rule_cached(n)


def product_cubature(
    n: int, d: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> CubatureRule:
    """d-dimensional product rule with Christoffel weights at Hermite zeros."""
    if d not in (1, 2):
        raise DimensionMismatchError(f"unsupported dimension {d}, expected 1 or 2")
    if n**d > node_budget:
        raise ResourceError(f"{n}**{d} nodes exceed the budget {node_budget}")
    base = gauss_hermite_rule(n)
    if d == 1:
        nodes = base.nodes.reshape(-1, 1)
        weights = base.christoffel_weights.copy()
    else:
        nodes = np.stack(
            np.meshgrid(base.nodes, base.nodes, indexing="ij"), axis=-1
        ).reshape(-1, 2)
        weights = np.multiply.outer(
            base.christoffel_weights, base.christoffel_weights
        ).ravel()
    return CubatureRule(d=d, base=base, nodes=nodes, weights=weights)


def integrate(rule: CubatureRule, f: Callable) -> float:
    """Apply the cubature: sum of weights times f at the nodes.

    ``f`` receives a (npts,) array for d = 1 or a (npts, d) array otherwise.
    """
    pts = rule.nodes[:, 0] if rule.d == 1 else rule.nodes
    vals = np.asarray(f(pts), dtype=float).ravel()
    return float(np.dot(rule.weights, vals))

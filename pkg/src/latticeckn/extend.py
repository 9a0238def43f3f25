"""Piecewise-multilinear extension of lattice functions to R^N.

On the unit cell ``Q = base + [0,1]^N`` the extension is the convex
combination ``sum_w c_w(x) u(base + w)`` over the ``2^N`` vertex offsets
``w in {0,1}^N`` with ``c_w(x) = prod_k (w_k x_k + (1 - w_k)(1 - x_k))``.
Norms of the extension and of its gradient are integrated cell by cell
with tensor Gauss-Legendre quadrature.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .funcspace import LatticeFunction, d1p_norm, lp_norm
from .lattice import Point


def offsets(N: int) -> np.ndarray:
    """Vertex offsets ``{0,1}^N`` in lexicographic order, shape ``(2^N, N)``."""
    return np.array(list(itertools.product((0, 1), repeat=N)), dtype=np.int64)


@dataclass(frozen=True)
class Cell:
    """Elementary cube ``base + [0,1]^N`` with its ``2^N`` vertex values
    (ordered as :func:`offsets`)."""

    base: Point
    values: tuple[float, ...]

    @classmethod
    def of(cls, u: LatticeFunction, base: Sequence[int]) -> "Cell":
        base = tuple(int(c) for c in base)
        vals = tuple(u(tuple(b + w for b, w in zip(base, off))) for off in offsets(u.N))
        return cls(base, vals)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule with ``order`` nodes on ``[0, 1]``."""

    order: int = 4

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("quadrature order must be >= 1")

    @cached_property
    def nodes(self) -> np.ndarray:
        x, _ = np.polynomial.legendre.leggauss(self.order)
        return 0.5 * (x + 1.0)

    @cached_property
    def weights(self) -> np.ndarray:
        _, w = np.polynomial.legendre.leggauss(self.order)
        return 0.5 * w

    def tensor(self, N: int) -> tuple[np.ndarray, np.ndarray]:
        """Nodes ``(order^N, N)`` and weights ``(order^N,)`` on ``[0,1]^N``."""
        grids = np.meshgrid(*[self.nodes] * N, indexing="ij")
        wgrids = np.meshgrid(*[self.weights] * N, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        w = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
        return pts, w


def _coeffs(x: np.ndarray, offs: np.ndarray) -> np.ndarray:
    # x: (M, N) local coordinates -> (M, 2^N)
    f = np.where(offs[None, :, :] == 1, x[:, None, :], 1.0 - x[:, None, :])
    return np.prod(f, axis=2)


def _coeff_derivs(x: np.ndarray, offs: np.ndarray) -> np.ndarray:
    # d c_w / d x_k, shape (M, N, 2^N)
    M, N = x.shape
    f = np.where(offs[None, :, :] == 1, x[:, None, :], 1.0 - x[:, None, :])
    out = np.empty((M, N, offs.shape[0]))
    for k in range(N):
        rest = np.prod(np.delete(f, k, axis=2), axis=2)
        out[:, k, :] = np.where(offs[:, k] == 1, 1.0, -1.0)[None, :] * rest
    return out


def barycentric_coeffs(x: Sequence[float], N: int) -> np.ndarray:
    """Multilinear weights ``c_w(x)`` of a point in the unit cell, ordered
    as :func:`offsets`."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != N:
        raise ValueError(f"point has dimension {x.size}, expected {N}")
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError(f"{x.tolist()} is outside the unit cell")
    return _coeffs(x[None, :], offsets(N))[0]


def evaluate_extension(u: LatticeFunction, x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    base = np.floor(x).astype(np.int64)
    c = barycentric_coeffs(x - base, u.N)
    cell = Cell.of(u, base)
    return math.fsum(ci * vi for ci, vi in zip(c, cell.values))


def _cell_table(u: LatticeFunction) -> np.ndarray:
    """Vertex values of every cell meeting ``supp(u)``, shape ``(M, 2^N)``."""
    offs = offsets(u.N)
    bases = {tuple(int(c) for c in np.subtract(x, w)) for x in u.support() for w in offs}
    bases = sorted(bases)
    vals = np.array([[u(tuple(b + int(o) for b, o in zip(base, w))) for w in offs] for base in bases])
    return vals.reshape(len(bases), len(offs))


def extension_lp_norm(u: LatticeFunction, p: float, rule: QuadratureRule | None = None) -> float:
    """Quadrature value of ``||u_bar||_{L^p(R^N)}``."""
    if p < 1:
        raise ValueError(f"p={p} must be >= 1")
    if u.is_zero():
        return 0.0
    rule = rule or QuadratureRule()
    pts, w = rule.tensor(u.N)
    vals = _cell_table(u) @ _coeffs(pts, offsets(u.N)).T
    return math.fsum((np.abs(vals) ** p @ w).tolist()) ** (1.0 / p)


def extension_grad_lp_norm(u: LatticeFunction, p: float, rule: QuadratureRule | None = None) -> float:
    """Quadrature value of ``||grad u_bar||_{L^p(R^N)}`` with the Euclidean
    length of the gradient."""
    if p < 1:
        raise ValueError(f"p={p} must be >= 1")
    if u.is_zero():
        return 0.0
    rule = rule or QuadratureRule()
    pts, w = rule.tensor(u.N)
    d = _coeff_derivs(pts, offsets(u.N))  # (Q, N, 2^N)
    grads = np.einsum("mv,qkv->mqk", _cell_table(u), d)
    mag = np.sqrt(np.sum(grads**2, axis=2))
    return math.fsum((mag**p @ w).tolist()) ** (1.0 / p)


@dataclass
class EquivalenceSummary:
    """Per-function ratios ``||u_bar||_{L^p} / ||u||_{l^p}`` (``lp``) and
    ``||grad u_bar||_{L^p} / ||u||_{D^{1,p}}`` (``grad``) with extremes."""

    lp: list[float]
    grad: list[float]

    @property
    def lp_min(self) -> float:
        return min(self.lp)

    @property
    def lp_max(self) -> float:
        return max(self.lp)

    @property
    def grad_min(self) -> float:
        return min(self.grad)

    @property
    def grad_max(self) -> float:
        return max(self.grad)

    def to_dict(self) -> dict:
        return {
            "count": len(self.lp),
            "lp_min": self.lp_min,
            "lp_max": self.lp_max,
            "grad_min": self.grad_min,
            "grad_max": self.grad_max,
        }


def equivalence_ratios(sample: Sequence[LatticeFunction], p: float, rule: QuadratureRule | None = None) -> EquivalenceSummary:
    lp, grad = [], []
    for u in sample:
        if u.is_zero():
            raise ValueError("equivalence ratios need nonzero functions")
        lp.append(extension_lp_norm(u, p, rule) / lp_norm(u, p))
        grad.append(extension_grad_lp_norm(u, p, rule) / d1p_norm(u, p))
    return EquivalenceSummary(lp, grad)

"""Finitely supported functions on Z^N and their weighted norms.

Two representations live here.  :class:`LatticeFunction` is the sparse,
exact form (a dict from points to nonzero floats) used at module
boundaries and for small computations.  The ``dense_*`` kernels work on
numpy arrays over a :class:`~latticeckn.lattice.Box` with implicit zeros
outside; they carry the inner loops of the minimizer.  The two are
implemented independently and cross-checked in the test-suite.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, SupportOutsideBox
from .lattice import Box, as_point, neighbors, norm1


class LatticeFunction:
    """A finitely supported real function on Z^N.

    Entries whose value is exactly zero are never stored, so two functions
    compare equal iff they agree at every lattice point.
    """

    __slots__ = ("N", "_values")

    def __init__(self, N: int, values: Mapping | Iterable = ()):
        if N < 1:
            raise ValueError("N must be >= 1")
        self.N = int(N)
        items = values.items() if isinstance(values, Mapping) else values
        vals = {}
        for x, v in items:
            v = float(v)
            if not math.isfinite(v):
                raise ValueError(f"non-finite value {v} at {x}")
            if v != 0.0:
                vals[as_point(x, self.N)] = v
        self._values = vals

    # -- constructors -------------------------------------------------------

    @classmethod
    def delta(cls, N: int, x: Sequence[int] | None = None, value: float = 1.0):
        x = (0,) * N if x is None else x
        return cls(N, {as_point(x, N): value})

    @classmethod
    def indicator(cls, N: int, points: Iterable[Sequence[int]], value: float = 1.0):
        return cls(N, {as_point(x, N): value for x in points})

    @classmethod
    def from_dense(cls, arr: np.ndarray, box: Box):
        arr = np.asarray(arr, dtype=float)
        if arr.shape != box.shape:
            raise DimensionMismatch(f"array shape {arr.shape} != box shape {box.shape}")
        idx = np.argwhere(arr != 0.0)
        vals = arr[tuple(idx.T)]
        return cls(box.N, ((tuple(int(c) - box.L for c in i), v) for i, v in zip(idx, vals)))

    def to_dense(self, box: Box) -> np.ndarray:
        if box.N != self.N:
            raise DimensionMismatch(f"box dimension {box.N} != {self.N}")
        arr = np.zeros(box.shape)
        for x, v in self._values.items():
            if not box.contains(x):
                raise SupportOutsideBox(f"point {x} lies outside the box L={box.L}")
            arr[box.index(x)] = v
        return arr

    # -- mapping protocol -----------------------------------------------------

    def __call__(self, x: Sequence[int]) -> float:
        return self._values.get(tuple(x), 0.0)

    def items(self):
        return self._values.items()

    def values(self):
        return self._values.values()

    def support(self) -> set:
        return set(self._values)

    def __len__(self):
        return len(self._values)

    def __iter__(self):
        return iter(self._values)

    def __eq__(self, other):
        if not isinstance(other, LatticeFunction):
            return NotImplemented
        return self.N == other.N and self._values == other._values

    def __hash__(self):
        return hash((self.N, frozenset(self._values.items())))

    def __repr__(self):
        body = ", ".join(f"{x}: {v!r}" for x, v in sorted(self._values.items()))
        return f"LatticeFunction(N={self.N}, {{{body}}})"

    # -- arithmetic -----------------------------------------------------------

    def _check(self, other):
        if other.N != self.N:
            raise DimensionMismatch(f"dimensions differ: {self.N} vs {other.N}")

    def __add__(self, other):
        return axpy(1.0, other, self)

    def __sub__(self, other):
        return axpy(-1.0, other, self)

    def __neg__(self):
        return scale(self, -1.0)

    def __mul__(self, t):
        return scale(self, t)

    __rmul__ = __mul__

    def radius(self) -> int:
        """Smallest L with the support inside ``Box(N, L)``."""
        return max((max(abs(c) for c in x) for x in self._values), default=0)

    def is_zero(self) -> bool:
        return not self._values


def scale(u: LatticeFunction, t: float) -> LatticeFunction:
    return LatticeFunction(u.N, ((x, t * v) for x, v in u.items()))


def axpy(alpha: float, x: LatticeFunction, y: LatticeFunction) -> LatticeFunction:
    """``alpha * x + y``."""
    y._check(x)
    out = dict(y.items())
    for k, v in x.items():
        out[k] = out.get(k, 0.0) + alpha * v
    return LatticeFunction(y.N, out)


def is_nonnegative(u: LatticeFunction) -> bool:
    return all(v >= 0.0 for v in u.values())


def pointwise(u: LatticeFunction, f) -> LatticeFunction:
    return LatticeFunction(u.N, ((x, f(v)) for x, v in u.items()))


def one_ring(u: LatticeFunction) -> set:
    """``supp(u)`` together with every neighbour of it."""
    pts = set(u.support())
    for x in u.support():
        pts.update(neighbors(x, u.N))
    return pts


# -- norms ------------------------------------------------------------------


def _check_p(p: float):
    if not (p >= 1.0):
        raise ValueError(f"exponent p={p} must be >= 1")


def lp_norm(u: LatticeFunction, p: float, a: float = 0.0) -> float:
    """Weighted norm ``(sum mu_{ap} |u|^p)^(1/p)``; ``p = inf`` gives
    ``sup mu_a |u|``."""
    _check_p(p)
    if u.is_zero():
        return 0.0
    if math.isinf(p):
        return max((1.0 + norm1(x)) ** a * abs(v) for x, v in u.items())
    s = math.fsum((1.0 + norm1(x)) ** (a * p) * abs(v) ** p for x, v in u.items())
    return s ** (1.0 / p)


def grad_norm_at(u: LatticeFunction, x: Sequence[int], p: float) -> float:
    """``|grad u(x)|_p = (sum_{y~x} |u(y) - u(x)|^p)^(1/p)``."""
    _check_p(p)
    ux = u(x)
    s = math.fsum(abs(u(y) - ux) ** p for y in neighbors(x, u.N))
    return s ** (1.0 / p)


def d1p_norm(u: LatticeFunction, p: float, a: float = 0.0) -> float:
    """``(sum_x sum_{y~x} mu_{ap}(x) |u(y) - u(x)|^p)^(1/p)``.

    Every edge is visited from both endpoints, each time with the weight of
    the endpoint it is visited from.
    """
    _check_p(p)
    terms = []
    for x in one_ring(u):
        ux = u(x)
        w = (1.0 + norm1(x)) ** (a * p)
        for y in neighbors(x, u.N):
            d = u(y) - ux
            if d != 0.0:
                terms.append(w * abs(d) ** p)
    return math.fsum(terms) ** (1.0 / p)


def p_laplacian(u: LatticeFunction, p: float) -> LatticeFunction:
    """``Delta_p u(x) = sum_{y~x} |u(y)-u(x)|^{p-2} (u(y)-u(x))`` on
    ``supp(u)`` and its one-ring; a zero difference contributes zero."""
    if not p > 1.0:
        raise ValueError(f"p={p} must be > 1")
    out = {}
    for x in one_ring(u):
        ux = u(x)
        terms = []
        for y in neighbors(x, u.N):
            d = u(y) - ux
            if d != 0.0:
                terms.append(math.copysign(abs(d) ** (p - 1.0), d))
        out[x] = math.fsum(terms)
    return LatticeFunction(u.N, out)


# -- distribution -------------------------------------------------------------


@dataclass(frozen=True)
class DistributionProfile:
    """Level-set counts ``|{x : |u(x)| > t}|``.

    ``thresholds`` starts at 0 and then lists every distinct ``|u|`` value
    in increasing order; the counts are strictly decreasing and end at 0.
    """

    thresholds: tuple[float, ...]
    counts: tuple[int, ...]

    def count(self, t: float) -> int:
        """Number of points with ``|u(x)| > t``."""
        if not self.thresholds:
            return 0
        k = bisect.bisect_right(self.thresholds, t) - 1
        return self.counts[max(k, 0)]


def distribution(u: LatticeFunction) -> DistributionProfile:
    if u.is_zero():
        return DistributionProfile((), ())
    mags = np.sort(np.abs(np.fromiter(u.values(), dtype=float)))
    levels = np.unique(mags)
    thresholds = np.concatenate(([0.0], levels))
    # number of |u| strictly above each threshold
    counts = len(mags) - np.searchsorted(mags, thresholds, side="right")
    return DistributionProfile(tuple(float(t) for t in thresholds), tuple(int(c) for c in counts))


# -- dense kernels --------------------------------------------------------------


def _fsum(arr: np.ndarray) -> float:
    return math.fsum(np.ravel(arr).tolist())


def dense_lp_norm(arr: np.ndarray, p: float, box: Box, a: float = 0.0) -> float:
    _check_p(p)
    if math.isinf(p):
        return float(np.max(box.weight_grid(a) * np.abs(arr), initial=0.0))
    w = box.weight_grid(a * p) if a != 0.0 else 1.0
    return _fsum(w * np.abs(arr) ** p) ** (1.0 / p)


def dense_energy(arr: np.ndarray, p: float, box: Box | None = None, a: float = 0.0) -> float:
    """``||u||_{D^{1,p}_a}^p`` for ``u`` given densely on ``box`` (zero
    outside).  ``box`` is only needed when ``a != 0``."""
    _check_p(p)
    padded = np.pad(arr, 1)
    if a != 0.0:
        w = box.grown(1).weight_grid(a * p)
    parts = []
    for k in range(arr.ndim):
        d = np.abs(np.diff(padded, axis=k)) ** p
        if a == 0.0:
            parts.append(2.0 * d)
        else:
            lo = [slice(None)] * arr.ndim
            hi = [slice(None)] * arr.ndim
            lo[k] = slice(None, -1)
            hi[k] = slice(1, None)
            parts.append((w[tuple(lo)] + w[tuple(hi)]) * d)
    return math.fsum(_fsum(q) for q in parts)


def dense_p_laplacian(arr: np.ndarray, p: float) -> np.ndarray:
    """``Delta_p u`` on the box grown by one (shape ``side + 2`` per axis)."""
    padded = np.pad(arr, 1)
    out = np.zeros_like(padded)
    for k in range(arr.ndim):
        d = np.diff(padded, axis=k)
        flux = np.sign(d) * np.abs(d) ** (p - 1.0)
        lo = [slice(None)] * arr.ndim
        hi = [slice(None)] * arr.ndim
        lo[k] = slice(None, -1)
        hi[k] = slice(1, None)
        # edge (x, x+e_k): x sees u(x+e_k) - u(x) = d, x+e_k sees -d
        out[tuple(lo)] += flux
        out[tuple(hi)] -= flux
    return out


def interior(arr: np.ndarray, k: int = 1) -> np.ndarray:
    """Strip ``k`` layers of padding on every side."""
    return arr[(slice(k, -k),) * arr.ndim]


def dense_energy_gradient(arr: np.ndarray, p: float) -> np.ndarray:
    """First variation of ``||u||_{D^{1,p}}^p`` with respect to ``u(z)`` for
    every ``z`` in the box: ``-2p Delta_p u(z)``."""
    return -2.0 * p * interior(dense_p_laplacian(arr, p))

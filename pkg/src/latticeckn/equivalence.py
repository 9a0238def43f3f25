"""Logarithmic cutoffs and the decay of their weighted gradient norms.

The cutoff is::

    eta(x) = 1 ^ (log R - log|x|) / (log R - log r) v 0

with ``|x|`` the Euclidean length.  With ``P = N / (b - a + 1)`` its
gradient is measured in ``l^P`` with weight ``mu_{(a-b)P}``, i.e. the
``D^{1,P}_{a-b}`` norm, and for ``a - b = 1`` by
``sup_x mu_1(x) sum_{y~x} |eta(y) - eta(x)|``.  As ``R`` grows the norm
behaves like ``log(R/r)^((b-a+1)/N - 1)`` (``log(R/r)^-1`` in the sup
case).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BoxTooSmall, InsufficientSamples
from .funcspace import LatticeFunction
from .lattice import Box

_CHUNK_POINTS = 1 << 22


@dataclass(frozen=True)
class CutoffSpec:
    r: float
    R: float
    N: int = 2
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if not self.r >= 10:
            raise ValueError(f"r = {self.r} must be at least 10")
        if not self.R > self.r:
            raise ValueError(f"R = {self.R} must exceed r = {self.r}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N = {self.N} must be a positive integer")
        if not 0.0 <= self.a - self.b <= 1.0:
            raise ValueError(f"a - b = {self.a - self.b} must lie in [0, 1]")

    @property
    def sup_branch(self) -> bool:
        return self.a - self.b == 1.0

    @property
    def exponent(self) -> float:
        """``P = N / (b - a + 1)``; infinite on the sup branch."""
        return math.inf if self.sup_branch else self.N / (self.b - self.a + 1.0)

    @property
    def predicted_slope(self) -> float:
        """Asymptotic slope of ``log(norm)`` against ``log(log(R/r))``."""
        if self.sup_branch:
            return -1.0
        return (self.b - self.a + 1.0) / self.N - 1.0

    @property
    def extent(self) -> int:
        """Radius beyond which (and at which) eta vanishes."""
        return int(math.ceil(self.R)) + 1


def eta_values(spec: CutoffSpec, r2: np.ndarray) -> np.ndarray:
    """``eta`` as a function of the squared Euclidean length."""
    r2 = np.asarray(r2, dtype=float)
    out = np.ones_like(r2)
    mid = r2 > spec.r * spec.r
    with np.errstate(divide="ignore"):
        t = (math.log(spec.R) - 0.5 * np.log(r2[mid])) / (math.log(spec.R) - math.log(spec.r))
    out[mid] = np.clip(t, 0.0, 1.0)
    return out


def make_cutoff(spec: CutoffSpec, box: Box) -> LatticeFunction:
    if box.N != spec.N:
        raise ValueError(f"box dimension {box.N} != {spec.N}")
    if box.L < spec.R + 2:
        raise BoxTooSmall(f"box radius {box.L} < R + 2 = {spec.R + 2}")
    r2 = sum(c.astype(float) ** 2 for c in box.coords())
    return LatticeFunction.from_dense(eta_values(spec, r2), box)


def _slab_terms(spec: CutoffSpec, rows: np.ndarray, M: int):
    """Per-point neighbour sums over the orthant rows ``rows`` (first
    coordinate), other coordinates in ``0..M``; returns the weighted
    contributions and their multiplicities."""
    N = spec.N
    P = spec.exponent
    # padded coordinates -1..M+1 on the transverse axes, rows-1..rows+1 on axis 0
    ax0 = np.arange(rows[0] - 1, rows[-1] + 2)
    other = np.arange(-1, M + 2)
    grids = np.meshgrid(ax0, *[other] * (N - 1), indexing="ij", sparse=True)
    r2 = sum(g.astype(float) ** 2 for g in grids)
    eta = eta_values(spec, r2)
    core = (slice(1, -1),) * N
    centre = eta[core]
    acc = np.zeros_like(centre)
    for k in range(N):
        for s in (-1, 1):
            sl = list(core)
            sl[k] = slice(1 + s, eta.shape[k] - 1 + s)
            d = np.abs(eta[tuple(sl)] - centre)
            acc += d if spec.sup_branch else d**P
    cg = np.meshgrid(rows, *[np.arange(0, M + 1)] * (N - 1), indexing="ij", sparse=True)
    l1 = sum(np.abs(g) for g in cg)
    mult = 2.0 ** sum((g != 0).astype(float) for g in cg)
    s = spec.a - spec.b
    if spec.sup_branch:
        return (1.0 + l1) * acc, mult
    w = (1.0 + l1) ** (s * P) if s != 0.0 else 1.0
    return w * acc, mult


def cutoff_gradient_norm(spec: CutoffSpec) -> float:
    """Weighted gradient norm of ``eta`` summed directly over the lattice,
    one slab of the nonnegative orthant at a time (``eta`` is invariant
    under coordinate sign changes)."""
    M = spec.extent
    per_row = (M + 1) ** (spec.N - 1)
    chunk = max(1, _CHUNK_POINTS // per_row)
    parts = []
    best = 0.0
    for start in range(0, M + 1, chunk):
        rows = np.arange(start, min(start + chunk, M + 1))
        vals, mult = _slab_terms(spec, rows, M)
        if spec.sup_branch:
            best = max(best, float(vals.max()))
        else:
            parts.append(float(np.sum(vals * mult)))
    if spec.sup_branch:
        return best
    return math.fsum(parts) ** (1.0 / spec.exponent)


@dataclass
class DecayFit:
    Rs: list[float]
    norms: list[float]
    slope: float
    predicted: float

    @property
    def monotone(self) -> bool:
        return all(b < a for a, b in zip(self.norms, self.norms[1:]))

    @property
    def relative_error(self) -> float:
        return abs(self.slope - self.predicted) / abs(self.predicted)


def decay_exponent_fit(specs: Sequence[CutoffSpec], norms: Sequence[float] | None = None) -> DecayFit:
    """Least-squares slope of ``log(norm)`` against ``log(log(R/r))``.

    ``specs`` must share ``r, N, a, b`` and have increasing ``R``, at least
    four values spanning two decades.
    """
    specs = list(specs)
    if len(specs) < 4:
        raise InsufficientSamples(f"need at least 4 radii, got {len(specs)}")
    first = specs[0]
    if any((s.r, s.N, s.a, s.b) != (first.r, first.N, first.a, first.b) for s in specs):
        raise ValueError("specs must differ only in R")
    Rs = [s.R for s in specs]
    if any(b <= a for a, b in zip(Rs, Rs[1:])):
        raise ValueError("R must be strictly increasing")
    if Rs[-1] / Rs[0] < 100.0:
        raise InsufficientSamples(f"R spans {Rs[-1] / Rs[0]:.3g}x, need two decades")
    norms = [cutoff_gradient_norm(s) for s in specs] if norms is None else list(norms)
    x = np.log(np.log(np.array(Rs) / first.r))
    y = np.log(np.array(norms))
    slope = float(np.polyfit(x, y, 1)[0])
    return DecayFit(Rs, norms, slope, first.predicted_slope)


def write_scan_csv(path, fit: DecayFit):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["R", "norm"])
        for R, n in zip(fit.Rs, fit.norms):
            w.writerow([repr(float(R)), repr(float(n))])

"""Geometry of the integer lattice graph Z^N.

Points are plain tuples of ints.  A :class:`Box` is the l-infinity cube
``{x : max|x_i| <= L}``; everything outside a box is treated as zero by the
rest of the package.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch

Point = tuple  # tuple[int, ...]

AXIS = "axis"
DIAG_MINUS = "diag_minus"
DIAG_PLUS = "diag_plus"


def as_point(x: Sequence[int], N: int | None = None) -> Point:
    pt = tuple(int(c) for c in x)
    if N is not None and len(pt) != N:
        raise DimensionMismatch(f"point {pt} has dimension {len(pt)}, expected {N}")
    return pt


def neighbors(x: Sequence[int], N: int) -> list[Point]:
    """The 2N lattice neighbours of ``x``, ordered +e_1, -e_1, +e_2, ..."""
    x = as_point(x, N)
    out = []
    for i in range(N):
        for s in (1, -1):
            y = list(x)
            y[i] += s
            out.append(tuple(y))
    return out


def distance(x: Sequence[int], y: Sequence[int]) -> int:
    """Combinatorial (graph) distance, i.e. the l1 distance."""
    if len(x) != len(y):
        raise DimensionMismatch(f"dimensions differ: {len(x)} vs {len(y)}")
    return int(sum(abs(int(a) - int(b)) for a, b in zip(x, y)))


def norm1(x: Sequence[int]) -> int:
    return int(sum(abs(int(c)) for c in x))


def weight(x: Sequence[int], s: float) -> float:
    """Vertex weight ``mu_s(x) = (1 + d(x))**s``."""
    return float((1.0 + norm1(x)) ** s)


@dataclass(frozen=True)
class Box:
    """The cube ``{x in Z^N : max_i |x_i| <= L}``.

    Dense arrays over a box have shape ``(2L+1,)*N``; array index ``k``
    along an axis is lattice coordinate ``k - L``.
    """

    N: int
    L: int

    def __post_init__(self):
        if self.N < 1 or self.L < 0:
            raise ValueError(f"invalid box N={self.N}, L={self.L}")

    @property
    def side(self) -> int:
        return 2 * self.L + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.side,) * self.N

    @property
    def size(self) -> int:
        return self.side**self.N

    def contains(self, x: Sequence[int]) -> bool:
        if len(x) != self.N:
            raise DimensionMismatch(f"point {tuple(x)} not of dimension {self.N}")
        return all(abs(int(c)) <= self.L for c in x)

    def points(self) -> Iterator[Point]:
        rng = range(-self.L, self.L + 1)
        return itertools.product(rng, repeat=self.N)

    def index(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(c) + self.L for c in x)

    def coords(self) -> list[np.ndarray]:
        """Open coordinate grids (as from ``np.ogrid``) over the box."""
        rng = np.arange(-self.L, self.L + 1)
        out = []
        for i in range(self.N):
            shape = [1] * self.N
            shape[i] = self.side
            out.append(rng.reshape(shape))
        return out

    def l1_grid(self) -> np.ndarray:
        d = np.zeros(self.shape, dtype=np.int64)
        for c in self.coords():
            d = d + np.abs(c)
        return d

    def weight_grid(self, s: float) -> np.ndarray:
        return (1.0 + self.l1_grid()) ** float(s)

    def grown(self, k: int = 1) -> "Box":
        return Box(self.N, self.L + k)


@dataclass(frozen=True)
class Direction:
    """An element of the direction set: ``e_i``, ``(e_i - e_j)/2`` or
    ``(e_i + e_j)/2`` with 0-based ``i < j``."""

    kind: str
    i: int
    j: int = -1

    def __post_init__(self):
        if self.kind == AXIS:
            if self.i < 0:
                raise ValueError("axis index must be >= 0")
        elif self.kind in (DIAG_MINUS, DIAG_PLUS):
            if not 0 <= self.i < self.j:
                raise ValueError("diagonal needs 0 <= i < j")
        else:
            raise ValueError(f"unknown direction kind {self.kind!r}")

    @property
    def name(self) -> str:
        if self.kind == AXIS:
            return f"e{self.i + 1}"
        sign = "-" if self.kind == DIAG_MINUS else "+"
        return f"(e{self.i + 1}{sign}e{self.j + 1})/2"

    def step(self, N: int) -> tuple[int, ...]:
        """Lattice vector joining consecutive points of a line; it raises
        ``<e, x>`` by exactly one."""
        v = [0] * N
        v[self.i] = 1
        if self.kind == DIAG_MINUS:
            v[self.j] = -1
        elif self.kind == DIAG_PLUS:
            v[self.j] = 1
        return tuple(v)

    def position2(self, x: Sequence[int]) -> int:
        """Doubled position ``2<e, x>``, always an integer."""
        if self.kind == AXIS:
            return 2 * int(x[self.i])
        if self.kind == DIAG_MINUS:
            return int(x[self.i]) - int(x[self.j])
        return int(x[self.i]) + int(x[self.j])

    def transverse(self, x: Sequence[int]) -> tuple[int, ...]:
        """Coordinates that are constant along the line through ``x``."""
        if self.kind == AXIS:
            return tuple(c for k, c in enumerate(x) if k != self.i)
        rest = tuple(c for k, c in enumerate(x) if k not in (self.i, self.j))
        if self.kind == DIAG_MINUS:
            return rest + (int(x[self.i]) + int(x[self.j]),)
        return rest + (int(x[self.i]) - int(x[self.j]),)


def directions(N: int) -> list[Direction]:
    """All N**2 directions in the canonical sweep order: the axes, then every
    ``(e_i - e_j)/2``, then every ``(e_i + e_j)/2``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    pairs = list(itertools.combinations(range(N), 2))
    return (
        [Direction(AXIS, i) for i in range(N)]
        + [Direction(DIAG_MINUS, i, j) for i, j in pairs]
        + [Direction(DIAG_PLUS, i, j) for i, j in pairs]
    )


INTEGER = "integer"
HALF_INTEGER = "half_integer"


@dataclass(frozen=True)
class Line:
    direction: Direction
    points: tuple[Point, ...]
    parity: str

    @cached_property
    def positions2(self) -> tuple[int, ...]:
        return tuple(self.direction.position2(x) for x in self.points)

    def __len__(self):
        return len(self.points)


def decompose(box: Box, e: Direction) -> list[Line]:
    """Partition the box into lines parallel to ``e``.

    Lines come in lexicographic order of their transverse coordinates and
    points within a line in increasing ``<e, x>``.
    """
    if e.kind == AXIS and e.i >= box.N or e.kind != AXIS and e.j >= box.N:
        raise DimensionMismatch(f"direction {e.name} not valid for N={box.N}")
    groups: dict[tuple[int, ...], list[Point]] = {}
    for x in box.points():
        groups.setdefault(e.transverse(x), []).append(x)
    lines = []
    for key in sorted(groups):
        pts = sorted(groups[key], key=e.position2)
        parity = INTEGER if e.position2(pts[0]) % 2 == 0 else HALF_INTEGER
        lines.append(Line(e, tuple(pts), parity))
    return lines

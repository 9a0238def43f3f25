"""Discrete Schwarz rearrangement on Z^N.

The rearrangement is built in three layers:

* :func:`rearrange_1d` sorts the values of a function on Z (or Z + 1/2) in
  decreasing order and lays them out alternately around the centre,
  largest first: positions 0, 1, -1, 2, -2, ... on Z and 1/2, -1/2, 3/2,
  -3/2, ... on Z + 1/2.
* :func:`one_step` applies that along every line parallel to one direction.
* :func:`schwarz` cycles one-step rearrangements over all N**2 directions
  until a full sweep changes nothing.

Every operation has a sparse implementation working on
:class:`LatticeFunction` and a dense one (``*_dense``) working on arrays
over a box; the dense form precomputes, for every line, the flat array
indices in placement order so a one-step rearrangement is a row-wise sort.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .errors import NegativeValues, NonConvergence, SupportOutsideBox
from .funcspace import LatticeFunction
from .lattice import AXIS, DIAG_MINUS, HALF_INTEGER, INTEGER, Box, Direction, decompose, directions


def slot_position2(k: int, parity: str) -> int:
    """Doubled position receiving the ``k``-th largest value (``k >= 1``)."""
    bit = 0 if parity == INTEGER else 1
    return k if k % 2 == bit else 1 - k


def _rank(t2: np.ndarray | int):
    # inverse of slot_position2: 0-based placement rank of doubled position t2
    return np.where(np.asarray(t2) > 0, np.asarray(t2) - 1, -np.asarray(t2))


def _to_pos2(x, parity: str) -> int:
    t2 = 2 * x
    if t2 != int(t2):
        raise ValueError(f"position {x} is neither integer nor half-integer")
    t2 = int(t2)
    if (t2 % 2 == 0) != (parity == INTEGER):
        raise ValueError(f"position {x} does not match parity {parity}")
    return t2


def _from_pos2(t2: int, parity: str):
    return t2 // 2 if parity == INTEGER else t2 / 2


def rearrange_1d(values: Mapping, parity: str = INTEGER) -> dict:
    """One-dimensional rearrangement of a nonnegative function.

    ``values`` maps positions (ints, or half-integers such as ``0.5`` when
    ``parity == "half_integer"``) to values.  Zero values are dropped from
    the output.
    """
    if parity not in (INTEGER, HALF_INTEGER):
        raise ValueError(f"unknown parity {parity!r}")
    vals = []
    for x, v in values.items():
        _to_pos2(x, parity)
        v = float(v)
        if v < 0:
            raise NegativeValues(f"negative value {v} at position {x}")
        if v > 0:
            vals.append(v)
    vals.sort(reverse=True)
    return {_from_pos2(slot_position2(k, parity), parity): v for k, v in enumerate(vals, 1)}


def _check_input(u: LatticeFunction, box: Box):
    if box.N != u.N:
        raise ValueError(f"box dimension {box.N} != function dimension {u.N}")
    for x, v in u.items():
        if v < 0:
            raise NegativeValues(f"negative value {v} at {x}")
        if not box.contains(x):
            raise SupportOutsideBox(f"support point {x} outside box L={box.L}")


def one_step(u: LatticeFunction, e: Direction, box: Box | None = None) -> LatticeFunction:
    """Rearrange ``u`` independently along every line parallel to ``e``."""
    box = Box(u.N, u.radius()) if box is None else box
    _check_input(u, box)
    out = {}
    for line in decompose(box, e):
        by_pos = dict(zip(line.positions2, line.points))
        vals = sorted((u(x) for x in line.points if u(x) != 0.0), reverse=True)
        for k, v in enumerate(vals, 1):
            t2 = slot_position2(k, line.parity)
            if t2 not in by_pos:
                raise SupportOutsideBox(f"line through {line.points[0]} cannot hold its rearrangement")
            out[by_pos[t2]] = v
    return LatticeFunction(u.N, out)


@dataclass
class SweepConfig:
    """Sweep cap and direction order for :func:`schwarz`.

    ``max_sweeps=None`` means ``10 * N**2 * (2L + 1)`` for the box in use.
    ``order=None`` means the canonical ``directions(N)``.
    """

    max_sweeps: int | None = None
    order: Sequence[Direction] | None = field(default=None)

    def resolve(self, box: Box) -> tuple[int, list[Direction]]:
        order = list(directions(box.N)) if self.order is None else list(self.order)
        if sorted(order, key=repr) != sorted(directions(box.N), key=repr):
            raise ValueError("order must be a permutation of directions(N)")
        max_sweeps = 10 * box.N**2 * box.side if self.max_sweeps is None else self.max_sweeps
        if max_sweeps < 1:
            raise ValueError("max_sweeps must be positive")
        return max_sweeps, order


def schwarz(u: LatticeFunction, box: Box | None = None, cfg: SweepConfig | None = None) -> LatticeFunction:
    """Discrete Schwarz rearrangement ``u*`` (sparse route)."""
    box = Box(u.N, u.radius()) if box is None else box
    _check_input(u, box)
    max_sweeps, order = (cfg or SweepConfig()).resolve(box)
    prev = u
    for _ in range(max_sweeps):
        cur = prev
        changed = False
        for e in order:
            nxt = one_step(cur, e, box)
            changed |= nxt != cur
            cur = nxt
        if not changed:
            return cur
        prev, last = cur, prev
    raise NonConvergence(f"no fixed point after {max_sweeps} sweeps", previous=last, last=prev)


def is_schwarz_symmetric(u: LatticeFunction, box: Box | None = None) -> bool:
    box = Box(u.N, u.radius()) if box is None else box
    _check_input(u, box)
    return all(one_step(u, e, box) == u for e in directions(u.N))


# -- dense route -----------------------------------------------------------------


def _pos2_and_transverse(box: Box, e: Direction):
    grids = [g.ravel() for g in np.meshgrid(*[np.arange(-box.L, box.L + 1)] * box.N, indexing="ij")]
    if e.kind == AXIS:
        t2 = 2 * grids[e.i]
        trans = [g for k, g in enumerate(grids) if k != e.i]
    else:
        rest = [g for k, g in enumerate(grids) if k not in (e.i, e.j)]
        if e.kind == DIAG_MINUS:
            t2 = grids[e.i] - grids[e.j]
            trans = rest + [grids[e.i] + grids[e.j]]
        else:
            t2 = grids[e.i] + grids[e.j]
            trans = rest + [grids[e.i] - grids[e.j]]
    return t2, trans


@lru_cache(maxsize=256)
def line_slots(box: Box, e: Direction) -> np.ndarray:
    """Flat indices of box points, one row per line (canonical line order),
    column ``k`` holding the point that receives the ``(k+1)``-th largest
    value; ``-1`` pads short rows.  Read-only."""
    t2, trans = _pos2_and_transverse(box, e)
    if trans:
        _, line_id = np.unique(np.stack(trans, axis=1), axis=0, return_inverse=True)
        line_id = line_id.ravel()
    else:
        line_id = np.zeros_like(t2)
    rank = _rank(t2)
    n_lines = int(line_id.max()) + 1
    lengths = np.bincount(line_id, minlength=n_lines)
    slots = np.full((n_lines, int(lengths.max())), -1, dtype=np.int64)
    slots[line_id, rank] = np.arange(t2.size)
    # every line must be a segment centred on position 0 (or +-1/2), so that
    # its ranks fill 0..len-1; otherwise rearranged mass could leave the box
    filled = (slots >= 0).sum(axis=1)
    if not np.array_equal(filled, lengths) or np.any(slots[np.arange(slots.shape[1]) >= lengths[:, None]] != -1):
        raise SupportOutsideBox(f"box {box} is not centred for direction {e.name}")
    slots.setflags(write=False)
    return slots


def one_step_dense(arr: np.ndarray, box: Box, e: Direction) -> np.ndarray:
    slots = line_slots(box, e)
    flat = arr.ravel()
    mask = slots >= 0
    take = np.where(mask, flat[slots], -1.0)
    take = -np.sort(-take, axis=1)
    out = np.empty_like(flat)
    out[slots[mask]] = take[mask]
    return out.reshape(arr.shape)


def schwarz_dense(arr: np.ndarray, box: Box, cfg: SweepConfig | None = None) -> tuple[np.ndarray, int]:
    """Dense Schwarz rearrangement; returns ``(u*, sweeps)`` where ``sweeps``
    counts full sweeps including the final verification sweep."""
    arr = np.asarray(arr, dtype=float)
    if arr.shape != box.shape:
        raise ValueError(f"array shape {arr.shape} != box shape {box.shape}")
    if np.any(arr < 0):
        raise NegativeValues("rearrangement needs a nonnegative function")
    max_sweeps, order = (cfg or SweepConfig()).resolve(box)
    cur = arr
    last = None
    for sweep in range(1, max_sweeps + 1):
        changed = False
        start = cur
        for e in order:
            nxt = one_step_dense(cur, box, e)
            if not changed and not np.array_equal(nxt, cur):
                changed = True
            cur = nxt
        if not changed:
            return cur, sweep
        last = start
    raise NonConvergence(f"no fixed point after {max_sweeps} sweeps", previous=last, last=cur)


def is_schwarz_symmetric_dense(arr: np.ndarray, box: Box) -> bool:
    if np.any(arr < 0):
        raise NegativeValues("rearrangement needs a nonnegative function")
    return all(np.array_equal(one_step_dense(arr, box, e), arr) for e in directions(box.N))

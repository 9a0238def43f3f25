"""Randomized property suites for the Schwarz rearrangement.

Each suite draws seeded random nonnegative functions on a box and counts
violations of one inequality or identity:

``hl``           sum u v <= sum u* v*
``ps``           ||u*||_{D^{1,p}} <= ||u||_{D^{1,p}}
``equimeasure``  every one-step rearrangement preserves the value multiset
``idempotence``  (u*)* = u*
``weighted``     ||u||_{l^q_b} <= ||u*||_{l^q_b} for b <= 0
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .funcspace import _fsum, dense_energy, dense_lp_norm
from .lattice import Box, directions
from .rearrange import one_step_dense, schwarz_dense

SUITES = ("hl", "ps", "equimeasure", "idempotence", "weighted")
RTOL = 1e-12


def random_function(rng: np.random.Generator, box: Box) -> np.ndarray:
    """Nonnegative array on ``box`` with random sparsity; about a third of
    the draws use a few integer levels so that ties are common."""
    density = rng.uniform(0.1, 1.0)
    mask = rng.random(box.shape) < density
    if rng.random() < 1 / 3:
        vals = rng.integers(1, 4, size=box.shape).astype(float)
    else:
        vals = rng.random(box.shape)
    u = np.where(mask, vals, 0.0)
    if not np.any(u > 0):
        u[box.index((0,) * box.N)] = 1.0
    return u


@dataclass
class SuiteResult:
    suite: str
    N: int
    L: int
    trials: int
    seed: int
    violations: int = 0
    # largest relative excess seen (positive means a violation)
    worst: float = -math.inf
    failures: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def record(self, trial: int, excess: float, tag=None):
        self.worst = max(self.worst, excess)
        if excess > 0:
            self.violations += 1
            self.failures.append({"trial": trial, "excess": excess, "case": tag})

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def _excess(small: float, big: float, rtol: float) -> float:
    """Relative amount by which ``small <= big`` fails beyond ``rtol``."""
    scale = max(abs(big), abs(small), 1e-300)
    return (small - big) / scale - rtol


def run_suite(
    suite: str,
    trials: int,
    seed: int,
    N: int,
    L: int,
    ps: tuple[float, ...] = (1.0, 1.5, 2.0, 3.0),
    bs: tuple[float, ...] = (-1.0, -0.5, 0.0),
    qs: tuple[float, ...] = (2.0, 4.0),
    rtol: float = RTOL,
) -> SuiteResult:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    box = Box(N, L)
    rng = np.random.default_rng(seed)
    res = SuiteResult(suite, N, L, trials, seed)
    dirs = directions(N)
    for t in range(trials):
        u = random_function(rng, box)
        if suite == "hl":
            v = random_function(rng, box)
            us, _ = schwarz_dense(u, box)
            vs, _ = schwarz_dense(v, box)
            res.record(t, _excess(_fsum(u * v), _fsum(us * vs), rtol))
        elif suite == "ps":
            us, _ = schwarz_dense(u, box)
            for p in ps:
                res.record(t, _excess(dense_energy(us, p), dense_energy(u, p), rtol), {"p": p})
        elif suite == "equimeasure":
            ref = np.sort(u, axis=None)
            for e in dirs:
                same = np.array_equal(np.sort(one_step_dense(u, box, e), axis=None), ref)
                res.record(t, -1.0 if same else 1.0, {"direction": e.name})
        elif suite == "idempotence":
            us, _ = schwarz_dense(u, box)
            uss, _ = schwarz_dense(us, box)
            res.record(t, -1.0 if np.array_equal(us, uss) else 1.0)
        else:
            us, _ = schwarz_dense(u, box)
            for b in bs:
                for q in qs:
                    res.record(t, _excess(dense_lp_norm(u, q, box, b), dense_lp_norm(us, q, box, b), rtol), {"b": b, "q": q})
    if suite == "ps":
        res.params = {"p": list(ps)}
    elif suite == "weighted":
        res.params = {"b": list(bs), "q": list(qs)}
    return res

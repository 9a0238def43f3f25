"""Rearrangement-projected minimization of the optimal constants S and K.

Both problems are solved on a nested family of boxes (zero outside).  On a
box the iteration is a projected quasi-Newton method on the constraint sphere:

1. take an L-BFGS direction for the scale-invariant quotient, seeded with
   the Dirichlet Laplacian as preconditioner (``memory=0`` gives plain
   preconditioned gradient descent);
2. step, clip negative values to zero, renormalize (:func:`descent_step`,
   with backtracking until the objective decreases);
3. replace the iterate by its Schwarz rearrangement and renormalize.  The
   rearrangement cannot raise the gradient norm nor lower the (radially
   non-increasing) weighted constraint norm, so this never raises the
   objective; both facts are asserted on every iteration.

Stationarity is measured by the relative Euler-Lagrange (KKT) residual
``||grad F - lam grad G|| / ||lam grad G||`` with the multiplier fixed by
pairing with ``u``.  For ``S`` this equals the relative residual of the
scaled ground state, which is what :mod:`latticeckn.elliptic` checks.

Each box after the first starts from the zero-extension of the previous
minimizer, which keeps the box energies non-increasing in ``L``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import fft

from .ckn import KParams, SParams
from .errors import StepStall
from .funcspace import LatticeFunction, _fsum, dense_energy, dense_energy_gradient, dense_lp_norm
from .lattice import Box
from .rearrange import SweepConfig, is_schwarz_symmetric_dense, schwarz_dense

log = logging.getLogger(__name__)

STEP_FLOOR = 1e-14
_ASSERT_RTOL = 1e-12
# objective slack allowed while polishing, a few ulps
_POLISH_RTOL = 8 * np.finfo(float).eps
_POLISH_HALVINGS = 6


@dataclass
class SolverConfig:
    box_radii: Sequence[int] = (8, 16, 24)
    step: float = 1.0
    tol_energy: float = 1e-10
    tol_exhaust: float = 1e-3
    # relative Euler-Lagrange residual required on every box
    tol_kkt: float = 1e-9
    # residual-driven steps once the objective stops resolving decreases
    polish_iters: int = 50
    max_iters: int = 2000
    seed: int = 0
    # multiplicative noise on the initial profile; 0 keeps it exactly symmetric
    init_noise: float = 0.0
    rearrange_every: int = 1
    # shift sigma in the preconditioner (-Delta + sigma)^-1
    precond_shift: float = 0.0
    # L-BFGS pairs kept; 0 gives plain preconditioned projected gradient
    memory: int = 10
    warm_start: bool = True
    max_sweeps: int | None = None

    def __post_init__(self):
        radii = list(self.box_radii)
        if not radii or any(b <= a for a, b in zip(radii, radii[1:])) or radii[0] < 1:
            raise ValueError(f"box_radii must be positive and strictly increasing: {radii}")
        for name in ("step", "tol_energy", "tol_exhaust", "tol_kkt"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.rearrange_every < 1 or self.max_iters < 1 or self.memory < 0:
            raise ValueError("rearrange_every and max_iters must be >= 1, memory >= 0")
        if self.precond_shift < 0 or self.init_noise < 0:
            raise ValueError("precond_shift and init_noise must be >= 0")
        self.box_radii = tuple(int(L) for L in radii)

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["box_radii"] = list(self.box_radii)
        return d


@dataclass
class BoxRecord:
    L: int
    energy: float
    iterations: int
    converged: bool
    kkt: float
    sweeps: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class MinimizeResult:
    """Outcome of :func:`minimize_S` / :func:`minimize_K`.

    ``energy`` is ``||u||_{D^{1,p}}^p`` for S and
    ``||u||_{D^{1,p}}^theta ||u||_{l^r}^(1-theta)`` for K; ``converged``
    refers to the exhaustion criterion, ``box_converged`` to stationarity on
    the last box.
    """

    kind: str
    u: LatticeFunction
    u_dense: np.ndarray
    box: Box
    energy: float
    per_box: list[BoxRecord]
    converged: bool
    params: SParams | KParams
    history: list[float] = field(default_factory=list, repr=False)

    @property
    def box_converged(self) -> bool:
        return self.per_box[-1].converged

    @property
    def kkt(self) -> float:
        return self.per_box[-1].kkt


# -- objectives ----------------------------------------------------------------


class _Problem:
    """Objective ``F`` and constraint norm ``C`` on a box, with gradients of
    ``F`` and of ``G = C**gamma`` (only the direction of the latter matters)."""

    def __init__(self, box: Box):
        self.box = box

    def objective(self, u):
        raise NotImplementedError

    def gradient(self, u):
        raise NotImplementedError

    def constraint(self, u):
        raise NotImplementedError

    def constraint_gradient(self, u):
        raise NotImplementedError

    def normalize(self, u):
        c = self.constraint(u)
        if not c > 0:
            raise StepStall("iterate collapsed to zero")
        return u / c


class SProblem(_Problem):
    """``F = ||u||_{D^{1,p}}^p`` on ``||u||_{l^q_b} = 1``."""

    def __init__(self, sp: SParams, box: Box):
        super().__init__(box)
        self.p, self.q, self.b = float(sp.p), float(sp.q), float(sp.b)
        self.w = box.weight_grid(self.q * self.b) if self.b != 0.0 else None

    def objective(self, u):
        return dense_energy(u, self.p)

    def gradient(self, u):
        return dense_energy_gradient(u, self.p)

    def constraint(self, u):
        return dense_lp_norm(u, self.q, self.box, self.b)

    def constraint_gradient(self, u):
        g = self.q * u ** (self.q - 1.0)
        return g if self.w is None else self.w * g


class KProblem(_Problem):
    """``F = ||u||_{D^{1,p}}^theta ||u||_{l^r}^(1-theta)`` on ``||u||_{l^q} = 1``."""

    def __init__(self, kp: KParams, box: Box):
        super().__init__(box)
        self.p, self.q, self.r, self.theta = float(kp.p), float(kp.q), float(kp.r), float(kp.theta)

    def parts(self, u):
        A = dense_energy(u, self.p) ** (1.0 / self.p) if self.theta != 0.0 else 1.0
        B = dense_lp_norm(u, self.r, self.box) if self.theta != 1.0 else 1.0
        return A, B

    def objective(self, u):
        A, B = self.parts(u)
        return A**self.theta * B ** (1.0 - self.theta)

    def gradient(self, u):
        A, B = self.parts(u)
        F = A**self.theta * B ** (1.0 - self.theta)
        g = np.zeros_like(u)
        if self.theta != 0.0:
            # d A = A^{1-p}/p * dE
            g += self.theta * F / A * (A ** (1.0 - self.p) / self.p) * dense_energy_gradient(u, self.p)
        if self.theta != 1.0:
            g += (1.0 - self.theta) * F / B * B ** (1.0 - self.r) * u ** (self.r - 1.0)
        return g

    def constraint(self, u):
        return dense_lp_norm(u, self.q, self.box)

    def constraint_gradient(self, u):
        return self.q * u ** (self.q - 1.0)


def _dot(x, y) -> float:
    return _fsum(x * y)


def kkt_residual(problem: _Problem, u: np.ndarray) -> float:
    """Relative Euler-Lagrange residual at a feasible ``u``."""
    g = problem.gradient(u)
    h = problem.constraint_gradient(u)
    lam = _dot(g, u) / _dot(h, u)
    return math.sqrt(_dot(g - lam * h, g - lam * h)) / math.sqrt(_dot(lam * h, lam * h))


class DirichletPreconditioner:
    """Applies ``(-Delta + sigma)^-1`` with zero boundary values outside the
    box, diagonalized by the type-I discrete sine transform."""

    def __init__(self, box: Box, sigma: float = 0.0):
        n = box.side
        lam1 = 2.0 - 2.0 * np.cos(np.pi * np.arange(1, n + 1) / (n + 1))
        eig = np.zeros(box.shape)
        for k in range(box.N):
            shape = [1] * box.N
            shape[k] = n
            eig = eig + lam1.reshape(shape)
        self.inv = 1.0 / (eig + sigma)

    def __call__(self, g: np.ndarray) -> np.ndarray:
        return fft.idstn(fft.dstn(g, type=1, norm="ortho") * self.inv, type=1, norm="ortho")


# -- one descent step -------------------------------------------------------------


@dataclass
class StepResult:
    u: np.ndarray
    accepted: bool
    step: float
    value: float


def descent_step(
    u: np.ndarray,
    objective: Callable[[np.ndarray], float],
    normalize: Callable[[np.ndarray], np.ndarray],
    step: float,
    direction: np.ndarray,
    value: float | None = None,
    raise_on_stall: bool = False,
) -> StepResult:
    """Projected trial ``normalize(max(u - step*direction, 0))``, accepted iff
    the objective strictly decreases; on rejection the step is halved down to
    ``STEP_FLOOR``.  A stall returns ``accepted=False`` with ``u`` unchanged
    (or raises :class:`StepStall`)."""
    value = objective(u) if value is None else value
    while step >= STEP_FLOOR:
        trial = np.maximum(u - step * direction, 0.0)
        if np.any(trial > 0):
            trial = normalize(trial)
            tv = objective(trial)
            if tv < value:
                return StepResult(trial, True, step, tv)
        step *= 0.5
    if raise_on_stall:
        raise StepStall(f"no decrease for steps down to {STEP_FLOOR:g}")
    return StepResult(u, False, step, value)


# -- driver -------------------------------------------------------------------------


def initial_guess(box: Box, cfg: SolverConfig) -> np.ndarray:
    """``exp(-d(x)^2 / L)``, optionally perturbed by seeded noise."""
    d = box.l1_grid().astype(float)
    u = np.exp(-(d**2) / box.L)
    if cfg.init_noise > 0:
        rng = np.random.default_rng(cfg.seed)
        u = u * (1.0 + cfg.init_noise * rng.random(box.shape))
    return u


def _embed(u: np.ndarray, small: Box, big: Box) -> np.ndarray:
    out = np.zeros(big.shape)
    k = big.L - small.L
    out[(slice(k, k + small.side),) * big.N] = u
    return out


def _rearranged(problem: _Problem, u: np.ndarray, sweep_cfg: SweepConfig):
    r, sweeps = schwarz_dense(u, problem.box, sweep_cfg)
    e_before, e_after = problem.objective(u), None
    c_before, c_after = problem.constraint(u), problem.constraint(r)
    assert c_after >= c_before * (1.0 - _ASSERT_RTOL), "rearrangement lowered the constraint norm"
    r = r / c_after
    e_after = problem.objective(r)
    assert e_after <= e_before * (1.0 + _ASSERT_RTOL), "rearrangement raised the objective"
    return r, sweeps


class _LbfgsMemory:
    """Limited-memory inverse-Hessian approximation seeded with the
    Dirichlet preconditioner."""

    def __init__(self, precond: DirichletPreconditioner, m: int):
        self.precond = precond
        self.m = m
        self.pairs: list[tuple[np.ndarray, np.ndarray, float]] = []

    def update(self, s: np.ndarray, y: np.ndarray):
        if self.m == 0:
            return
        sy = _dot(s, y)
        # curvature condition; pairs broken by clipping or rearrangement are dropped
        if sy <= 1e-16 * math.sqrt(_dot(s, s) * _dot(y, y)):
            return
        self.pairs.append((s, y, 1.0 / sy))
        if len(self.pairs) > self.m:
            self.pairs.pop(0)

    def apply(self, g: np.ndarray) -> np.ndarray:
        q = g.copy()
        alphas = []
        for s, y, rho in reversed(self.pairs):
            a = rho * _dot(s, q)
            alphas.append(a)
            q -= a * y
        gamma = 1.0
        if self.pairs:
            s, y, _ = self.pairs[-1]
            gamma = _dot(s, y) / _dot(y, self.precond(y))
        r = gamma * self.precond(q)
        for (s, y, rho), a in zip(self.pairs, reversed(alphas)):
            r += (a - rho * _dot(y, r)) * s
        return r


def _reduced_gradient(problem: _Problem, u: np.ndarray) -> tuple[np.ndarray, float]:
    """Gradient of the scale-invariant quotient at a feasible ``u``
    (``grad F - lam grad G``) and the relative KKT residual."""
    g = problem.gradient(u)
    h = problem.constraint_gradient(u)
    lam = _dot(g, u) / _dot(h, u)
    res = g - lam * h
    return res, math.sqrt(_dot(res, res)) / math.sqrt(_dot(lam * h, lam * h))


def _polish(problem, u, value, grad, kkt, memory, cfg, sweep_cfg, history, sweeps):
    """Steps accepted on a decrease of the KKT residual while the objective
    stays within rounding of its current value; used once the objective can
    no longer resolve a decrease."""
    ceiling = value * (1.0 + _POLISH_RTOL)

    def attempt(direction):
        step = cfg.step
        for _ in range(_POLISH_HALVINGS):
            trial = np.maximum(u - step * direction, 0.0)
            step *= 0.5
            if not np.any(trial > 0):
                continue
            trial, sw = _rearranged(problem, problem.normalize(trial), sweep_cfg)
            tv = problem.objective(trial)
            new_grad, new_kkt = _reduced_gradient(problem, trial)
            if new_kkt < kkt and tv <= ceiling:
                return trial, tv, new_grad, new_kkt, sw
        return None

    n = 0
    while n < cfg.polish_iters and kkt > cfg.tol_kkt:
        found = attempt(memory.apply(grad))
        if found is None and memory.pairs:
            memory.pairs.clear()
            found = attempt(memory.apply(grad))
        if found is None:
            break
        trial, tv, new_grad, new_kkt, sweeps = found
        memory.update(trial - u, new_grad - grad)
        u, value, grad, kkt = trial, tv, new_grad, new_kkt
        history.append(value)
        n += 1
    return u, value, grad, kkt, sweeps, n


def _solve_box(problem: _Problem, u0: np.ndarray, cfg: SolverConfig, history: list[float]) -> tuple[np.ndarray, BoxRecord]:
    box = problem.box
    sweep_cfg = SweepConfig(max_sweeps=cfg.max_sweeps)
    memory = _LbfgsMemory(DirichletPreconditioner(box, cfg.precond_shift), cfg.memory)
    u, sweeps = _rearranged(problem, problem.normalize(u0), sweep_cfg)
    value = problem.objective(u)
    history.append(value)
    grad, kkt = _reduced_gradient(problem, u)
    rel_change = math.inf
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        if kkt <= cfg.tol_kkt and rel_change < cfg.tol_energy:
            converged = True
            break
        direction = memory.apply(grad)
        if not _dot(direction, grad) > 0.0:
            memory.pairs.clear()
            direction = memory.apply(grad)
        res = descent_step(u, problem.objective, problem.normalize, cfg.step, direction, value)
        if not res.accepted and memory.pairs:
            memory.pairs.clear()
            direction = memory.apply(grad)
            res = descent_step(u, problem.objective, problem.normalize, cfg.step, direction, value)
        if not res.accepted:
            # no representable decrease left: polish on the residual instead
            u, value, grad, kkt, sweeps, extra = _polish(
                problem, u, value, grad, kkt, memory, cfg, sweep_cfg, history, sweeps
            )
            it += extra
            converged = kkt <= cfg.tol_kkt
            break
        u_new, new_value = res.u, res.value
        if it % cfg.rearrange_every == 0:
            u_new, sweeps = _rearranged(problem, u_new, sweep_cfg)
            new_value = problem.objective(u_new)
        assert new_value <= value * (1.0 + _ASSERT_RTOL), "energy increased"
        new_grad, kkt = _reduced_gradient(problem, u_new)
        memory.update(u_new - u, new_grad - grad)
        rel_change = abs(value - new_value) / abs(value)
        u, value, grad = u_new, new_value, new_grad
        history.append(value)
    else:
        converged = kkt <= cfg.tol_kkt and rel_change < cfg.tol_energy
    if not is_schwarz_symmetric_dense(u, box):
        u, sweeps = _rearranged(problem, u, sweep_cfg)
        value = problem.objective(u)
        kkt = kkt_residual(problem, u)
    log.info("box L=%d: energy=%.15g iters=%d kkt=%.3g converged=%s", box.L, value, it, kkt, converged)
    return u, BoxRecord(box.L, value, it, converged, kkt, sweeps)


def _minimize(kind, params, make_problem, cfg: SolverConfig) -> MinimizeResult:
    N = params.N
    per_box: list[BoxRecord] = []
    history: list[float] = []
    prev_u, prev_box = None, None
    exhausted = False
    for L in cfg.box_radii:
        box = Box(N, L)
        problem = make_problem(box)
        if prev_u is not None and cfg.warm_start:
            u0 = _embed(prev_u, prev_box, box)
        else:
            u0 = initial_guess(box, cfg)
        u, rec = _solve_box(problem, u0, cfg, history)
        per_box.append(rec)
        prev_u, prev_box = u, box
        if len(per_box) >= 2:
            e0, e1 = per_box[-2].energy, per_box[-1].energy
            if abs(e1 - e0) / abs(e0) < cfg.tol_exhaust:
                exhausted = True
                break
    return MinimizeResult(
        kind=kind,
        u=LatticeFunction.from_dense(prev_u, prev_box),
        u_dense=prev_u,
        box=prev_box,
        energy=per_box[-1].energy,
        per_box=per_box,
        converged=exhausted,
        params=params,
        history=history,
    )


def minimize_S(sp: SParams, cfg: SolverConfig | None = None) -> MinimizeResult:
    """Approximate ``S = inf ||u||_{D^{1,p}}^p`` over ``||u||_{l^q_b} = 1``."""
    cfg = cfg or SolverConfig()
    return _minimize("S", sp, lambda box: SProblem(sp, box), cfg)


def minimize_K(kp: KParams, cfg: SolverConfig | None = None) -> MinimizeResult:
    """Approximate ``K = inf ||u||_{D^{1,p}}^theta ||u||_{l^r}^(1-theta)``
    over ``||u||_{l^q} = 1``."""
    cfg = cfg or SolverConfig()
    return _minimize("K", kp, lambda box: KProblem(kp, box), cfg)

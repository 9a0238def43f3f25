"""Ground states of the Euler-Lagrange equations of S and K.

For the Sobolev/Hardy constant the equation is::

    Delta_p v + mu_{qb} v^(q-1) = 0

and for the Gagliardo-Nirenberg constant::

    lam1 Delta_p v - lam2 v^(r-1) + v^(q-1) = 0

A constrained minimizer ``u`` (``||u||_{l^q_b} = 1``) satisfies
``-2p Delta_p u = lam q mu_{qb} u^(q-1)``; pairing with ``u`` and using
``<-Delta_p u, u> = E/2`` gives ``lam = p S / q``, i.e.
``-Delta_p u = (S/2) mu_{qb} u^(q-1)``.  Since the two sides scale like
``t^(p-1)`` and ``t^(q-1)``, ``v = t u`` with ``t^(q-p) = S/2`` solves the
first equation.

For ``F = A^theta B^(1-theta)`` (``A = E^(1/p)``, ``B = ||u||_r``) the same
pairing gives ``lam q = F``, and dividing the first-order condition by
``F`` leaves the second equation with unit coefficient on ``u^(q-1)`` and
``lam1 = 2 theta / E``, ``lam2 = (1 - theta) / B^r``; no rescaling is
needed.

Residuals are evaluated on box points only: outside the box ``v`` is held
at zero (Dirichlet condition) and the equation is not imposed there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .ckn import KParams, SParams
from .errors import DegenerateTheta, NotConverged, ScalingDegenerate
from .funcspace import LatticeFunction, dense_energy, dense_lp_norm, one_ring, p_laplacian
from .lattice import Box, norm1
from .rearrange import is_schwarz_symmetric_dense
from .varmin import MinimizeResult


@dataclass(frozen=True)
class Forcing:
    """Which equation to substitute into: ``lambda1 Delta_p v +
    mu_{qb} v^(q-1) - lambda2 v^(r-1)``."""

    p: float
    q: float
    b: float = 0.0
    lambda1: float = 1.0
    lambda2: float = 0.0
    r: float | None = None

    def __post_init__(self):
        if self.lambda2 != 0.0 and self.r is None:
            raise ValueError("r is required when lambda2 != 0")


class Residual(NamedTuple):
    l2: float
    rel: float
    # True when the forcing term vanishes and ``rel`` is reported as 0
    zero_forcing: bool


def el_residual(v: LatticeFunction, forcing: Forcing, box: Box | None = None) -> Residual:
    """Substitute ``v`` into the equation described by ``forcing``.

    The left side is evaluated pointwise on ``supp(v)`` and its one-ring,
    restricted to ``box`` when one is given, and measured in l^2; the
    relative residual divides by ``||mu_{qb} v^(q-1)||_{l^2}``.
    """
    f = forcing
    lap = p_laplacian(v, f.p) if not v.is_zero() else v
    pts = one_ring(v)
    if box is not None:
        pts = [x for x in pts if box.contains(x)]
    res_terms, force_terms = [], []
    for x in pts:
        vx = v(x)
        force = (1.0 + norm1(x)) ** (f.q * f.b) * vx ** (f.q - 1.0) if vx > 0 else 0.0
        lhs = f.lambda1 * lap(x) + force
        if f.lambda2 != 0.0 and vx > 0:
            lhs -= f.lambda2 * vx ** (f.r - 1.0)
        res_terms.append(lhs * lhs)
        force_terms.append(force * force)
    l2 = math.sqrt(math.fsum(res_terms))
    fn = math.sqrt(math.fsum(force_terms))
    if fn == 0.0:
        return Residual(l2, 0.0, True)
    return Residual(l2, l2 / fn, False)


@dataclass
class GroundState:
    """Scaled positive solution ``v = scale * u`` on ``box``.

    ``lambda1``/``lambda2`` are the equation coefficients (``None`` when the
    term is absent), ``multiplier`` the Lagrange multiplier of the
    constrained problem and ``energy`` the minimized value (S or K).
    """

    kind: str
    v: LatticeFunction
    v_dense: np.ndarray
    box: Box
    scale: float
    energy: float
    multiplier: float
    lambda1: float | None
    lambda2: float | None
    residual_l2: float
    residual_rel: float
    positive_interior: bool
    symmetric: bool

    def coefficient(self, k: int) -> float:
        """``lambda_k``; raises :class:`DegenerateTheta` if that term was
        dropped from the equation."""
        lam = {1: self.lambda1, 2: self.lambda2}[k]
        if lam is None:
            raise DegenerateTheta(f"lambda{k} is absent from the {self.kind} equation")
        return lam

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "scale": self.scale,
            "energy": self.energy,
            "multiplier": self.multiplier,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "residual_l2": self.residual_l2,
            "residual_rel": self.residual_rel,
            "positive_interior": self.positive_interior,
            "symmetric": self.symmetric,
        }


def _positive_interior(arr: np.ndarray) -> bool:
    inner = arr[(slice(1, -1),) * arr.ndim]
    return bool(np.all(inner > 0))


def _check_result(res: MinimizeResult, kind: str, require_converged: bool):
    if res.kind != kind:
        raise ValueError(f"expected a {kind} minimization result, got {res.kind}")
    if require_converged and not res.box_converged:
        raise NotConverged(f"minimizer on box L={res.box.L} is not stationary (kkt={res.kkt:.3g})")


def ground_state_S(res: MinimizeResult, sp: SParams, require_converged: bool = True) -> GroundState:
    """Scale the S minimizer into a solution of
    ``Delta_p v + mu_{qb} v^(q-1) = 0``."""
    _check_result(res, "S", require_converged)
    p, q, b = float(sp.p), float(sp.q), float(sp.b)
    if q == p:
        raise ScalingDegenerate("q = p leaves the scale undetermined")
    box = res.box
    u = res.u_dense / dense_lp_norm(res.u_dense, q, box, b)
    S = dense_energy(u, p)
    t = (S / 2.0) ** (1.0 / (q - p))
    v = t * u
    vf = LatticeFunction.from_dense(v, box)
    r = el_residual(vf, Forcing(p=p, q=q, b=b), box)
    return GroundState(
        kind="S",
        v=vf,
        v_dense=v,
        box=box,
        scale=t,
        energy=S,
        multiplier=p * S / q,
        lambda1=1.0,
        lambda2=None,
        residual_l2=r.l2,
        residual_rel=r.rel,
        positive_interior=_positive_interior(v),
        symmetric=is_schwarz_symmetric_dense(v, box),
    )


def k_coefficients(E: float, B: float, theta: float, r: float) -> tuple[float | None, float | None]:
    """``(lambda1, lambda2)`` of the K equation for a minimizer with
    ``||u||_q = 1``, energy ``E`` and ``||u||_r = B``; a term with zero
    weight in the objective is dropped (``None``)."""
    lam1 = 2.0 * theta / E if theta != 0.0 else None
    lam2 = (1.0 - theta) / B**r if theta != 1.0 else None
    return lam1, lam2


def ground_state_K(res: MinimizeResult, kp: KParams, require_converged: bool = True) -> GroundState:
    """Ground state of ``lam1 Delta_p v - lam2 v^(r-1) + v^(q-1) = 0``."""
    _check_result(res, "K", require_converged)
    p, q, r, theta = float(kp.p), float(kp.q), float(kp.r), float(kp.theta)
    box = res.box
    u = res.u_dense / dense_lp_norm(res.u_dense, q, box)
    E = dense_energy(u, p)
    B = dense_lp_norm(u, r, box)
    lam1, lam2 = k_coefficients(E, B, theta, r)
    K = (E ** (1.0 / p)) ** theta * B ** (1.0 - theta)
    uf = LatticeFunction.from_dense(u, box)
    forcing = Forcing(p=p, q=q, lambda1=lam1 or 0.0, lambda2=lam2 or 0.0, r=r)
    rr = el_residual(uf, forcing, box)
    return GroundState(
        kind="K",
        v=uf,
        v_dense=u,
        box=box,
        scale=1.0,
        energy=K,
        multiplier=K / q,
        lambda1=lam1,
        lambda2=lam2,
        residual_l2=rr.l2,
        residual_rel=rr.rel,
        positive_interior=_positive_interior(u),
        symmetric=is_schwarz_symmetric_dense(u, box),
    )

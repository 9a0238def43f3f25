"""Parameters of the discrete CKN inequality and its quotient functional.

The inequality reads::

    ||u||_{l^q_b} <= C ||u||_{D^{1,p}_a}^theta ||u||_{l^r_c}^(1-theta)

with the critical exponent ``q*`` fixed by the balance condition::

    1/q* + b/N = theta (1/p + (a-1)/N) + (1-theta) (1/r + c/N)

and it holds for every ``q >= q*``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .errors import InfeasibleBalance, ParameterError, Subcritical, ZeroFunction
from .funcspace import LatticeFunction, d1p_norm, lp_norm

CRITICAL = "Critical"
SUPERCRITICAL = "Supercritical"

# range guard against overflow in mu_s = (1+d)^s; not a hypothesis of the
# inequality itself
_MAX_EXPONENT = 1e3
_REL_EQ = 1e-12


def critical_q(N, p, r, a, b, c, theta) -> float:
    """Solve the balance condition for ``q*``."""
    recip = theta * (1.0 / p + (a - 1.0) / N) + (1.0 - theta) * (1.0 / r + c / N) - b / N
    if not recip > 0.0:
        raise InfeasibleBalance(f"1/q* = {recip!r} is not positive")
    return 1.0 / recip


def _regime(q: float, q_star: float) -> str:
    if abs(q - q_star) <= _REL_EQ * max(abs(q), abs(q_star)):
        return CRITICAL
    if q < q_star:
        raise Subcritical(f"q = {q} < q* = {q_star}")
    return SUPERCRITICAL


def _finite(**kw):
    for k, v in kw.items():
        if not math.isfinite(v):
            raise ParameterError("Range", f"{k} = {v} is not finite")
        if abs(v) > _MAX_EXPONENT:
            raise ParameterError("Range", f"|{k}| = {abs(v)} exceeds {_MAX_EXPONENT:g}")


@dataclass(frozen=True)
class CknParams:
    """Validated parameter tuple; construction raises
    :class:`~latticeckn.errors.ParameterError` naming the failed hypothesis."""

    N: int
    p: float
    q: float
    r: float
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    theta: float = 1.0
    q_star: float = field(init=False)
    regime: str = field(init=False)

    def __post_init__(self):
        N, p, q, r, a, b, c, theta = self.N, self.p, self.q, self.r, self.a, self.b, self.c, self.theta
        if int(N) != N or N < 1:
            raise ParameterError("Dimension", f"N = {N} must be a positive integer")
        _finite(p=p, q=q, r=r, a=a, b=b, c=c, theta=theta)
        for name, v in (("p", p), ("q", q), ("r", r)):
            if not v > 1.0:
                raise ParameterError(f"{name}>1", f"{name} = {v} must exceed 1")
        if not 0.0 <= theta <= 1.0:
            raise ParameterError("0<=theta<=1", f"theta = {theta}")
        if not 1.0 / p + a / N > 0.0:
            raise ParameterError("1/p+a/N>0", f"1/p + a/N = {1.0 / p + a / N}")
        if not 1.0 / r + c / N > 0.0:
            raise ParameterError("1/r+c/N>0", f"1/r + c/N = {1.0 / r + c / N}")
        if not b <= theta * a + (1.0 - theta) * c:
            raise ParameterError("b<=theta*a+(1-theta)*c", f"b = {b} > {theta * a + (1.0 - theta) * c}")
        q_star = critical_q(N, p, r, a, b, c, theta)
        object.__setattr__(self, "q_star", q_star)
        object.__setattr__(self, "regime", _regime(q, q_star))

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("q_star")
        d.pop("regime")
        return d


def validate(params) -> CknParams:
    """Check a parameter set given as a mapping (e.g. a parsed parameter
    document) or an existing :class:`CknParams`; the returned object carries
    ``q_star`` and ``regime``."""
    if isinstance(params, CknParams):
        params = params.to_dict()
    known = {"N", "p", "q", "r", "a", "b", "c", "theta"}
    extra = set(params) - known
    if extra:
        raise ParameterError("UnknownKey", f"unexpected parameters {sorted(extra)}")
    missing = {"N", "p", "q", "r"} - set(params)
    if missing:
        raise ParameterError("MissingKey", f"missing parameters {sorted(missing)}")
    return CknParams(**params)


@dataclass(frozen=True)
class SParams:
    """Sobolev/Hardy case: ``theta = 1``, ``a = c = 0``,
    ``1 < p < N``, ``-1 <= b <= 0`` and ``q > q* = Np/(N - p - pb) > 1``."""

    N: int
    p: float
    q: float
    b: float = 0.0
    q_star: float = field(init=False)

    def __post_init__(self):
        N, p, q, b = self.N, self.p, self.q, self.b
        if int(N) != N or N < 1:
            raise ParameterError("Dimension", f"N = {N} must be a positive integer")
        _finite(p=p, q=q, b=b)
        if not 1.0 < p < N:
            raise ParameterError("1<p<N", f"p = {p}, N = {N}")
        if not -1.0 <= b <= 0.0:
            raise ParameterError("-1<=b<=0", f"b = {b}")
        denom = N - p - p * b
        if not denom > 0.0:
            raise InfeasibleBalance(f"N - p - pb = {denom} is not positive")
        q_star = N * p / denom
        if not q_star > 1.0:
            raise ParameterError("q*>1", f"q* = {q_star}")
        object.__setattr__(self, "q_star", q_star)
        if _regime(q, q_star) != SUPERCRITICAL:
            raise ParameterError("q>q*", f"q = {q} must exceed q* = {q_star} (critical case excluded)")

    def to_ckn(self) -> CknParams:
        return CknParams(N=self.N, p=self.p, q=self.q, r=self.p, a=0.0, b=self.b, c=0.0, theta=1.0)

    def to_dict(self) -> dict:
        return {"N": self.N, "p": self.p, "q": self.q, "b": self.b}


@dataclass(frozen=True)
class KParams:
    """Gagliardo-Nirenberg case ``a = b = c = 0`` with
    ``1/q* = theta (1/p - 1/N) + (1 - theta)/r`` and ``q > q* > 1``."""

    N: int
    p: float
    r: float
    q: float
    theta: float
    q_star: float = field(init=False)

    def __post_init__(self):
        N, p, r, q, theta = self.N, self.p, self.r, self.q, self.theta
        if int(N) != N or N < 1:
            raise ParameterError("Dimension", f"N = {N} must be a positive integer")
        _finite(p=p, r=r, q=q, theta=theta)
        for name, v in (("p", p), ("r", r)):
            if not v > 1.0:
                raise ParameterError(f"{name}>1", f"{name} = {v} must exceed 1")
        if not 0.0 <= theta <= 1.0:
            raise ParameterError("0<=theta<=1", f"theta = {theta}")
        recip = theta * (1.0 / p - 1.0 / N) + (1.0 - theta) / r
        if not recip > 0.0:
            raise InfeasibleBalance(f"1/q* = {recip} is not positive")
        q_star = 1.0 / recip
        if not q_star > 1.0:
            raise ParameterError("q*>1", f"q* = {q_star}")
        object.__setattr__(self, "q_star", q_star)
        if _regime(q, q_star) != SUPERCRITICAL:
            raise ParameterError("q>q*", f"q = {q} must exceed q* = {q_star} (critical case excluded)")

    def to_ckn(self) -> CknParams:
        return CknParams(N=self.N, p=self.p, q=self.q, r=self.r, theta=self.theta)

    def to_dict(self) -> dict:
        return {"N": self.N, "p": self.p, "r": self.r, "q": self.q, "theta": self.theta}


def ckn_quotient(u: LatticeFunction, *, p, q, r, a=0.0, b=0.0, c=0.0, theta=1.0) -> float:
    """``||u||_{D^{1,p}_a}^theta ||u||_{l^r_c}^(1-theta) / ||u||_{l^q_b}`` for
    arbitrary exponents; a factor with zero power is not evaluated."""
    if u.is_zero():
        raise ZeroFunction("the quotient is undefined for u = 0")
    num = 1.0
    if theta != 0.0:
        num *= d1p_norm(u, p, a) ** theta
    if theta != 1.0:
        num *= lp_norm(u, r, c) ** (1.0 - theta)
    return num / lp_norm(u, q, b)


def quotient(u: LatticeFunction, params: CknParams) -> float:
    return ckn_quotient(
        u, p=params.p, q=params.q, r=params.r, a=params.a, b=params.b, c=params.c, theta=params.theta
    )

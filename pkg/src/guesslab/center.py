"""L_alpha-center and radius of a finite family of PMFs.

The center is found by maximizing the informativity J(mu) = sign(rho) h(F(mu)),
F(mu) = sum_i mu_i P_i / h(P_i), over mixture weights.  J is concave and its
partial derivatives are exactly I(P_i, Q_mu), so the Frank-Wolfe gap equals
max_i I(P_i, Q_mu) - J(mu) = K_plus - K_minus at the current iterate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from ._simplex import maximize_on_simplex
from .infomeasures import h_hessian, l_alpha, log_h
from .probkit import (
    Alphabet,
    GuessingList,
    JointPmf,
    LogBase,
    OrderParam,
    common_alphabet,
    nuisance,
    sort_to_list,
)

DEFAULT_TOL = 1e-8
MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class FamilySpec:
    """A finite uncertainty set of PMFs on one alphabet."""

    members: tuple

    def __post_init__(self):
        members = tuple(self.members)
        common_alphabet(members)
        object.__setattr__(self, "members", members)

    @property
    def alphabet(self) -> Alphabet:
        return self.members[0].alphabet

    @property
    def size(self) -> int:
        return len(self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def stacked(self) -> np.ndarray:
        """Member masses as rows of an (m, |Y| * |X|) array."""
        return np.stack([p.vector() for p in self.members])


@dataclass(frozen=True, eq=False)
class CenterResult:
    mu_star: np.ndarray
    q_star: JointPmf
    radius_C: float
    k_plus: float
    k_minus: float
    nasc_residuals: np.ndarray
    normalizer_d: float
    iterations: int = 0
    base: LogBase = LogBase.BITS

    @property
    def gap(self) -> float:
        return self.k_plus - self.k_minus


class CenterNotConverged(RuntimeError):
    def __init__(self, message: str, best: CenterResult):
        super().__init__(message)
        self.best = best

    @property
    def gap(self) -> float:
        return self.best.gap


def _as_weights(mu, m: int) -> np.ndarray:
    mu = np.asarray(mu, dtype=float).ravel()
    if mu.shape != (m,) or np.any(mu < 0) or abs(mu.sum() - 1.0) > 1e-12:
        raise ValueError("mixture weights must be a probability vector over the members")
    return mu


class _Objective:
    """Vectorized J(mu) and its gradient (I(P_i, Q_mu))_i for one family and order."""

    def __init__(self, fam: FamilySpec, op: OrderParam):
        self.op = op
        self.shape = fam.alphabet.shape
        self.stack = fam.stacked()
        self.log_h = np.array([log_h(p, op) for p in fam.members])
        self.scaled = self.stack * np.exp(-self.log_h)[:, None]  # f(P_i) = P_i / h(P_i)
        with np.errstate(divide="ignore"):
            self.log_p = np.log(self.stack)
        self.member_support = self.stack > 0

    def mixture(self, mu: np.ndarray) -> np.ndarray:
        return mu @ self.scaled

    def value(self, mu: np.ndarray) -> float:
        F = self.mixture(mu).reshape(self.shape)
        a = self.op.alpha
        with np.errstate(divide="ignore"):
            rows = logsumexp(a * np.log(F), axis=1) / a
        return self.op.sign * math.exp(float(logsumexp(rows)))

    def log_tilt(self, F: np.ndarray) -> np.ndarray:
        a = self.op.alpha
        F = F.reshape(self.shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            lf = a * np.log(F)
            out = lf - logsumexp(lf, axis=1, keepdims=True)
        out[~np.isfinite(out)] = -np.inf
        return out.ravel()

    def member_i(self, log_q_tilt: np.ndarray) -> np.ndarray:
        """I(P_i, Q) for every member, given ln Q'."""
        rho = self.op.rho
        with np.errstate(invalid="ignore"):
            terms = np.where(self.member_support, self.log_p - rho * log_q_tilt[None, :], -np.inf)
        lse = logsumexp(terms, axis=1)
        with np.errstate(over="ignore"):
            return self.op.sign * np.exp(lse - self.log_h)

    def grad(self, mu: np.ndarray) -> np.ndarray:
        return self.member_i(self.log_tilt(self.mixture(mu)))

    def hess(self, mu: np.ndarray) -> np.ndarray:
        """Hessian of J on the members with mu > 0 (other rows and columns are 0)."""
        act = mu > 0
        F = self.mixture(mu).reshape(self.shape)
        W = self.scaled[act].reshape((-1,) + self.shape)
        out = np.zeros((mu.size, mu.size))
        out[np.ix_(act, act)] = self.op.sign * h_hessian(W, F, self.op.alpha)
        return out


def informativity(mu, fam: FamilySpec, op: OrderParam) -> float:
    """J(mu) = sign(rho) * h(sum_i mu_i P_i / h(P_i))."""
    mu = _as_weights(mu, fam.size)
    return _Objective(fam, op).value(mu)


def mixture_center(mu, fam: FamilySpec, op: OrderParam) -> JointPmf:
    """Q = d^-1 sum_i mu_i P_i / h(P_i) with d = sum_i mu_i / h(P_i)."""
    mu = _as_weights(mu, fam.size)
    obj = _Objective(fam, op)
    F = obj.mixture(mu)
    return JointPmf(fam.alphabet, (F / F.sum()).reshape(obj.shape))


def _result(obj: _Objective, fam: FamilySpec, mu: np.ndarray, iterations: int, base: LogBase) -> CenterResult:
    op = obj.op
    F = obj.mixture(mu)
    d = float(F.sum())
    q = JointPmf(fam.alphabet, (F / d).reshape(obj.shape))
    k_minus = obj.value(mu)
    ivals = obj.member_i(obj.log_tilt(F))
    k_plus = float(np.max(ivals))
    radius = base.from_nats(math.log(op.sign * k_minus) / op.rho)
    return CenterResult(
        mu_star=mu,
        q_star=q,
        radius_C=radius,
        k_plus=k_plus,
        k_minus=k_minus,
        nasc_residuals=k_minus - ivals,
        normalizer_d=d,
        iterations=iterations,
        base=base,
    )


def solve_center(
    fam: FamilySpec,
    op: OrderParam,
    tol: float = DEFAULT_TOL,
    base=LogBase.BITS,
    mu0: Sequence[float] | None = None,
    max_iter: int = MAX_ITER,
) -> CenterResult:
    """Center Q*, radius C and the certificate K_plus - K_minus <= tol.

    Raises :class:`CenterNotConverged` (carrying the best iterate) when the duality
    gap is still above ``tol`` after ``max_iter`` Frank-Wolfe steps.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    base = LogBase.coerce(base)
    obj = _Objective(fam, op)
    m = fam.size
    x0 = np.full(m, 1.0 / m) if mu0 is None else _as_weights(mu0, m)
    state = maximize_on_simplex(obj.value, obj.grad, x0, tol, max_iter=max_iter, hess=obj.hess)
    res = _result(obj, fam, state.x, state.iterations, base)
    if not res.gap <= tol:
        raise CenterNotConverged(
            f"center solver stopped after {state.iterations} iterations with gap {res.gap:.3e} > {tol:.1e}",
            res,
        )
    return res


def member_divergences(fam: FamilySpec, q: JointPmf, op: OrderParam, base=LogBase.BITS) -> np.ndarray:
    return np.array([l_alpha(p, q, op, base) for p in fam.members])


def radius_check(fam: FamilySpec, res: CenterResult, op: OrderParam, tol: float = 1e-6) -> float:
    """max_i L_alpha(P_i, Q*) - C, recomputed member by member; raises if above ``tol``."""
    dev = float(np.max(member_divergences(fam, res.q_star, op, res.base))) - res.radius_C
    cap = res.base.from_nats(math.log(fam.alphabet.nx))
    if dev > tol:
        raise AssertionError(f"max member divergence exceeds radius by {dev:.3e}")
    if res.radius_C > cap + tol:
        raise AssertionError(f"radius {res.radius_C} exceeds log|X| = {cap}")
    return dev


def minsup_guesser(fam: FamilySpec, op: OrderParam, tol: float = DEFAULT_TOL) -> GuessingList:
    """G* = the list sorted by the center Q*; sup_P R(P, G*) <= C + log(1 + ln|X|)."""
    if not op.rho > 0:
        raise ValueError("guessing requires rho > 0 (alpha < 1)")
    return sort_to_list(solve_center(fam, op, tol).q_star)


def minsup_bounds(fam: FamilySpec, res: CenterResult) -> tuple[float, float]:
    """(C - log(1 + ln|X|), C + log(1 + ln|X|)): the min-sup redundancy lies in between."""
    nz = nuisance(fam.alphabet.nx, res.base)
    return res.radius_C - nz, res.radius_C + nz


__all__ = [
    "CenterNotConverged",
    "CenterResult",
    "FamilySpec",
    "informativity",
    "member_divergences",
    "minsup_bounds",
    "minsup_guesser",
    "mixture_center",
    "radius_check",
    "solve_center",
]

"""Guessing moments, mismatch bounds, redundancy, and Campbell's exponential code lengths."""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .infomeasures import l_alpha, renyi_entropy
from .probkit import Alphabet, GuessingList, JointPmf, LogBase, OrderParam, nuisance, sort_to_list

CEIL_NUDGE = 1e-12
CAMPBELL_ORACLE_MAX_X = 6


def _check_rho(rho: float, positive: bool):
    if positive and not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    if not rho > -1 or rho == 0:
        raise ValueError(f"rho must satisfy rho > -1, rho != 0; got {rho}")


def guessing_moment(p: JointPmf, g: GuessingList, rho: float) -> float:
    """E[G(X,Y)^rho] under P."""
    _check_rho(rho, positive=False)
    if p.alphabet.shape != g.alphabet.shape:
        raise ValueError("PMF and list must share an alphabet")
    return float(np.sum(p.mass * g.rank.astype(float) ** rho))


def guessing_exponent(p: JointPmf, g: GuessingList, rho: float, base=LogBase.BITS) -> float:
    """(1/rho) log E[G^rho]."""
    return LogBase.coerce(base).from_nats(math.log(guessing_moment(p, g, rho)) / rho)


def mismatch_upper_bound(p: JointPmf, q: JointPmf, rho: float, base=LogBase.BITS) -> float:
    """Upper bound on (1/rho) log E[G_Q^rho] for a source P guessed with the list of Q.

    Evaluates (1/rho) log sum_{x,y} P(x,y) [sum_a (Q(a,y)/Q(x,y))^(1/(1+rho))]^rho
    literally from the ratio matrix.
    """
    _check_rho(rho, positive=True)
    if np.any(q.mass <= 0):
        raise ValueError("full-support Q required")
    ratio = q.mass[:, None, :] / q.mass[:, :, None]  # [y, x, a] = Q(a,y)/Q(x,y)
    inner = np.sum(ratio ** (1.0 / (1.0 + rho)), axis=2)
    total = float(np.sum(p.mass * inner**rho))
    return LogBase.coerce(base).from_nats(math.log(total) / rho)


def converse_pmf(g: GuessingList, rho: float) -> JointPmf:
    """Q_G(x,y) = 1 / (|Y| c G(x,y)^(1+rho)) with c = sum_i i^-(1+rho)."""
    _check_rho(rho, positive=True)
    nx, ny = g.alphabet.nx, g.alphabet.ny
    c = float(np.sum(np.arange(1, nx + 1, dtype=float) ** -(1.0 + rho)))
    mass = g.rank.astype(float) ** -(1.0 + rho) / (c * ny)
    return JointPmf(g.alphabet, mass / mass.sum())


def converse_lower_bound(p: JointPmf, g: GuessingList, rho: float, base=LogBase.BITS) -> float:
    """Right side of the converse: mismatch bound at Q_G minus log(1 + ln|X|)."""
    return mismatch_upper_bound(p, converse_pmf(g, rho), rho, base) - nuisance(p.nx, base)


def redundancy(p: JointPmf, g: GuessingList, rho: float, base=LogBase.BITS) -> float:
    """R(P, G) = (1/rho) log E[G^rho] - (1/rho) log E[G_P^rho]."""
    _check_rho(rho, positive=True)
    used = guessing_moment(p, g, rho)
    best = guessing_moment(p, sort_to_list(p), rho)
    return LogBase.coerce(base).from_nats((math.log(used) - math.log(best)) / rho)


@dataclass(frozen=True)
class MomentReport:
    rho: float
    moment: float
    exponent: float
    lower: float
    upper: float

    @property
    def holds(self) -> bool:
        return self.lower <= self.exponent <= self.upper


def arikan_sandwich(p: JointPmf, rho: float, base=LogBase.BITS) -> MomentReport:
    """Matched-list exponent together with [H_alpha - log(1 + ln|X|), H_alpha]."""
    _check_rho(rho, positive=True)
    g = sort_to_list(p)
    moment = guessing_moment(p, g, rho)
    b = LogBase.coerce(base)
    exponent = b.from_nats(math.log(moment) / rho)
    h = renyi_entropy(p, OrderParam.from_rho(rho), b)
    return MomentReport(rho, moment, exponent, h - nuisance(p.nx, b), h)


# ---------------------------------------------------------------- Campbell coding


@dataclass(frozen=True, eq=False)
class LengthFunction:
    """Nonnegative integer code lengths l[y, x] (binary code alphabet)."""

    alphabet: Alphabet
    lengths: np.ndarray

    def __post_init__(self):
        l = np.asarray(self.lengths)
        if l.ndim == 1:
            l = l[None, :]
        if l.shape != self.alphabet.shape:
            raise ValueError("lengths shape does not match alphabet")
        if np.any(l < 0) or not np.all(l == np.round(l)):
            raise ValueError("lengths must be nonnegative integers")
        l = l.astype(np.int64)
        l.setflags(write=False)
        object.__setattr__(self, "lengths", l)

    def kraft_sums(self) -> list:
        """Exact per-y Kraft sums as Fractions."""
        from fractions import Fraction

        return [sum(Fraction(1, 2 ** int(v)) for v in row) for row in self.lengths]

    def in_kraft_window(self) -> bool:
        """1/2 < sum_x 2^-l(x,y) <= 1 for every y (exact)."""
        return all(0.5 < k <= 1 for k in self.kraft_sums())

    def __eq__(self, other):
        if not isinstance(other, LengthFunction):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.lengths, other.lengths)

    __hash__ = None


def campbell_length(q: JointPmf, rho: float) -> LengthFunction:
    """l_Q(x,y) = ceil(-log2 Q'(x|y)), Q' tilted with alpha = 1/(1 + rho)."""
    _check_rho(rho, positive=False)
    if np.any(q.mass <= 0):
        raise ValueError("campbell_length needs Q with no zero-mass cell")
    a = 1.0 / (1.0 + rho)
    lq = a * np.log(q.mass)
    neglog2 = -(lq - logsumexp(lq, axis=1, keepdims=True)) / math.log(2)
    lengths = np.ceil(neglog2 - CEIL_NUDGE)
    return LengthFunction(q.alphabet, np.maximum(lengths, 0))


def length_pmf(l: LengthFunction, rho: float) -> JointPmf:
    """Q_l(x,y) proportional to 2^(-(1+rho) l(x,y)) within each y, each row scaled to 1/|Y|."""
    _check_rho(rho, positive=False)
    if not l.in_kraft_window():
        raise ValueError("length function violates the Kraft window 1/2 < sum 2^-l <= 1")
    e = -(1.0 + rho) * l.lengths * math.log(2)
    rows = np.exp(e - logsumexp(e, axis=1, keepdims=True))
    mass = rows / l.alphabet.ny
    return JointPmf(l.alphabet, mass / mass.sum())


def campbell_exponent(p: JointPmf, l: LengthFunction, rho: float) -> float:
    """(1/rho) log2 E[2^(rho l)] in bits, via log-sum-exp."""
    _check_rho(rho, positive=False)
    sup = p.mass > 0
    terms = np.log(p.mass[sup]) + rho * l.lengths[sup] * math.log(2)
    return float(logsumexp(terms)) / rho / math.log(2)


@functools.lru_cache(maxsize=None)
def _window_table(nx: int) -> np.ndarray:
    """All length vectors in {0..nx+1}^nx inside the Kraft window."""
    top = nx + 1
    grid = np.array(list(itertools.product(range(top + 1), repeat=nx)), dtype=np.int64)
    scaled = np.sum(np.left_shift(1, top - grid), axis=1)  # 2^top * sum 2^-l
    keep = (scaled > 2 ** (top - 1)) & (scaled <= 2**top)
    table = grid[keep]
    table.setflags(write=False)
    return table


def optimal_campbell(p: JointPmf, rho: float) -> tuple[float, LengthFunction]:
    """Best exponent (1/rho) log2 E[2^(rho l)] over the Kraft window, by exhaustive search.

    The search is per y, over lengths 0..|X|+1 (optimal codes never need longer words).
    """
    _check_rho(rho, positive=False)
    if p.nx > CAMPBELL_ORACLE_MAX_X:
        raise ValueError("oracle limited to small alphabets (|X| <= 6)")
    table = _window_table(p.nx)
    weights = np.exp2(rho * table.astype(float))  # [K, nx]
    best_rows, best_vals = [], []
    for row in p.mass:
        vals = weights @ row
        k = int(np.argmin(vals)) if rho > 0 else int(np.argmax(vals))
        best_rows.append(table[k])
        best_vals.append(vals[k])
    total = float(np.sum(best_vals))
    return math.log2(total) / rho, LengthFunction(p.alphabet, np.array(best_rows))


def campbell_redundancy(p: JointPmf, l: LengthFunction, rho: float) -> float:
    """R_c(P, l) in bits: exponent of l minus the optimal exponent."""
    if not l.in_kraft_window():
        raise ValueError("length function violates the Kraft window 1/2 < sum 2^-l <= 1")
    best, _ = optimal_campbell(p, rho)
    return campbell_exponent(p, l, rho) - best


def campbell_penalty(p: JointPmf, l: LengthFunction, rho: float) -> float:
    """L_alpha(P, Q_l) in bits; stays within 1 bit of R_c."""
    return l_alpha(p, length_pmf(l, rho), OrderParam.from_rho(rho), LogBase.BITS)


__all__ = [
    "LengthFunction",
    "MomentReport",
    "arikan_sandwich",
    "campbell_exponent",
    "campbell_length",
    "campbell_penalty",
    "campbell_redundancy",
    "converse_lower_bound",
    "converse_pmf",
    "guessing_exponent",
    "guessing_moment",
    "length_pmf",
    "mismatch_upper_bound",
    "optimal_campbell",
    "redundancy",
]

"""Rényi entropies, tilted PMFs and the L_alpha divergence family.

Everything is evaluated in natural-log space and converted to the requested base at
the end.  Divergences are plain floats and may be ``math.inf``.

Conventions: 0 log 0 = 0, x/0 = +inf for x > 0, (+inf)**(negative) = 0.  For the
tilt used *inside* divergences, a y-row of Q with no mass tilts to all zeros (so
that the support conditions for an infinite divergence come out exactly); the
public :func:`tilt` keeps the uniform fallback row instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .probkit import Alphabet, JointPmf, LogBase, OrderParam

ALPHA_ONE_GUARD = 1e-6


def _log(a: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(a)


def _as_order(op) -> OrderParam:
    return op if isinstance(op, OrderParam) else OrderParam(op)


def _as_vector(p) -> np.ndarray:
    if isinstance(p, JointPmf):
        if p.ny != 1:
            raise ValueError("operation requires |Y| = 1")
        return p.mass[0]
    v = np.asarray(p, dtype=float)
    if v.ndim != 1:
        raise ValueError("expected a PMF on a single alphabet")
    return v


def log_h(p: JointPmf, op: OrderParam) -> float:
    """ln h(P), with h(P) = sum_y (sum_x P(x,y)^alpha)^(1/alpha)."""
    a = _as_order(op).alpha
    row = logsumexp(a * _log(p.mass), axis=1) / a
    return float(logsumexp(row))


def h_value(p: JointPmf, op: OrderParam) -> float:
    return math.exp(log_h(p, op))


def renyi_entropy(p: JointPmf, op: OrderParam, base=LogBase.BITS) -> float:
    """Conditional Rényi entropy H_alpha(P) = (alpha / (1 - alpha)) log h(P)."""
    op = _as_order(op)
    return LogBase.coerce(base).from_nats(log_h(p, op) / op.rho)


def shannon_entropy(v, base=LogBase.BITS) -> float:
    v = np.asarray(v, dtype=float).ravel()
    v = v[v > 0]
    return LogBase.coerce(base).from_nats(float(-np.sum(v * np.log(v))))


def side_weights(p: JointPmf, op: OrderParam) -> np.ndarray:
    """w(y) = (sum_x P(x,y)^alpha)^(1/alpha) / h(P), a PMF on Y."""
    a = _as_order(op).alpha
    row = logsumexp(a * _log(p.mass), axis=1) / a
    return np.exp(row - logsumexp(row))


@dataclass(frozen=True, eq=False)
class TiltedConditional:
    """Rows P'(. | y) proportional to P(., y)^alpha."""

    alphabet: Alphabet
    mass: np.ndarray
    alpha: float

    def row(self, y: int = 0) -> np.ndarray:
        return self.mass[y]


def _log_tilt(p: JointPmf, alpha: float, fallback: bool) -> np.ndarray:
    lp = alpha * _log(p.mass)
    norm = logsumexp(lp, axis=1, keepdims=True)
    with np.errstate(invalid="ignore"):
        out = lp - norm
    empty = ~np.isfinite(norm[:, 0])
    if np.any(empty):
        out[empty] = -math.log(p.nx) if fallback else -np.inf
    return out


def tilt(p: JointPmf, op: OrderParam) -> TiltedConditional:
    """Tilted conditional PMF; a y-row with no mass becomes uniform."""
    op = _as_order(op)
    m = np.exp(_log_tilt(p, op.alpha, fallback=True))
    m.setflags(write=False)
    return TiltedConditional(p.alphabet, m, op.alpha)


def log_cross(p: JointPmf, q: JointPmf, op: OrderParam) -> float:
    """ln sum_{x,y} P(x,y) Q'(x|y)^(-rho); may be +inf or -inf."""
    op = _as_order(op)
    sup = p.mass > 0
    lq = _log_tilt(q, op.alpha, fallback=False)[sup]
    if op.rho > 0 and np.any(np.isneginf(lq)):
        return math.inf
    terms = _log(p.mass[sup]) - op.rho * lq
    return float(logsumexp(terms))


def _check_alpha(op: OrderParam):
    if abs(op.alpha - 1.0) < ALPHA_ONE_GUARD:
        raise ValueError(
            f"|alpha - 1| < {ALPHA_ONE_GUARD}: L_alpha is ill-conditioned here; use kl_limit_check"
        )


def l_alpha(p: JointPmf, q: JointPmf, op: OrderParam, base=LogBase.BITS) -> float:
    """L_alpha(P, Q) = (1/rho) [ln sum P Q'^(-rho) - ln h(P)] in the given base."""
    op = _as_order(op)
    _check_alpha(op)
    if p.alphabet.shape != q.alphabet.shape:
        raise ValueError("P and Q must live on the same alphabet")
    lc = log_cross(p, q, op)
    if not math.isfinite(lc):
        return math.inf
    val = (lc - log_h(p, op)) / op.rho
    return LogBase.coerce(base).from_nats(val)


def i_value(p: JointPmf, q: JointPmf, op: OrderParam) -> float:
    """I(P, Q) = sign(rho) / h(P) * sum P(x,y) Q'(x|y)^(-rho)."""
    op = _as_order(op)
    lc = log_cross(p, q, op)
    if lc == math.inf:
        return op.sign * math.inf
    return op.sign * math.exp(lc - log_h(p, op))


def l_from_i(i: float, op: OrderParam, base=LogBase.BITS) -> float:
    """Invert I to L_alpha: (1/rho) log(sign(rho) I)."""
    op = _as_order(op)
    s = op.sign * i
    if s == math.inf or s <= 0:
        return math.inf
    return LogBase.coerce(base).from_nats(math.log(s) / op.rho)


def i_from_l(value: float, op: OrderParam, base=LogBase.BITS) -> float:
    """Level t = sign(rho) * base^(rho * value) matching an L_alpha level."""
    op = _as_order(op)
    b = LogBase.coerce(base).value
    return op.sign * math.exp(op.rho * value * math.log(b))


def renyi_divergence(r, s, beta: float, base=LogBase.BITS) -> float:
    """D_beta(R || S) = 1/(beta - 1) log sum R^beta S^(1 - beta)."""
    if not beta > 0 or beta == 1:
        raise ValueError("beta must be positive and != 1")
    r, s = _as_vector(r), _as_vector(s)
    sup = r > 0
    ls = _log(s[sup])
    if beta > 1 and np.any(np.isneginf(ls)):
        return math.inf
    terms = beta * np.log(r[sup]) + (1 - beta) * ls
    lse = float(logsumexp(terms))
    if lse == -math.inf:
        return math.inf
    return LogBase.coerce(base).from_nats(lse / (beta - 1))


def f_divergence(r, s, op: OrderParam) -> float:
    """I_f(R || S) with f(x) = sign(rho) x^(1 + rho)."""
    op = _as_order(op)
    r, s = _as_vector(r), _as_vector(s)
    sup = r > 0
    ls = _log(s[sup])
    if op.rho > 0 and np.any(np.isneginf(ls)):
        return math.inf
    terms = (1 + op.rho) * np.log(r[sup]) - op.rho * ls
    return op.sign * math.exp(float(logsumexp(terms)))


def kl_divergence(r, s, base=LogBase.BITS) -> float:
    r, s = _as_vector(r), _as_vector(s)
    sup = r > 0
    if np.any(s[sup] == 0):
        return math.inf
    val = float(np.sum(r[sup] * (np.log(r[sup]) - np.log(s[sup]))))
    return LogBase.coerce(base).from_nats(val)


def kl_limit_check(p: JointPmf, q: JointPmf, base=LogBase.BITS) -> float:
    """Conditional KL divergence sum_y sum_x P(x,y) log(P(x|y) / Q(x|y)), the alpha -> 1 limit."""
    sup = p.mass > 0
    pc, qc = p.conditional(), q.conditional()
    if np.any(qc[sup] == 0):
        return math.inf
    val = float(np.sum(p.mass[sup] * (np.log(pc[sup]) - np.log(qc[sup]))))
    return LogBase.coerce(base).from_nats(val)


def h_gradient(W: np.ndarray, F: np.ndarray, alpha: float) -> np.ndarray:
    """d h(F) / d mu for F = sum_i mu_i W_i; W has shape (k, |Y|, |X|), F shape (|Y|, |X|).

    Entries where W_i > 0 but F = 0 are +inf for alpha < 1 and 0 for alpha > 1.
    """
    with np.errstate(divide="ignore"):
        lf = np.log(F)
    lnorm = logsumexp(alpha * lf, axis=1, keepdims=True) / alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        expo = np.log(W) + (alpha - 1) * (lf - lnorm)[None]
        terms = np.where(W > 0, np.exp(expo), 0.0)
    return terms.reshape(len(W), -1).sum(axis=1)


def h_hessian(W: np.ndarray, F: np.ndarray, alpha: float) -> np.ndarray:
    """Hessian of mu -> h(sum_i mu_i W_i) at F, over the rows of W.

    Per side symbol y, with S = sum_x F^alpha and u = F^(alpha - 1), the Hessian of
    ||F_y||_alpha is (alpha - 1) S^(1/alpha - 1) [diag(F^(alpha - 2)) - u u^T / S].
    Cells with F = 0 must carry no weight in W.
    """
    a = alpha
    H = np.zeros((len(W), len(W)))
    for y in range(F.shape[0]):
        pos = F[y] > 0
        if not np.any(pos):
            continue
        fy, wy = F[y, pos], W[:, y, pos]
        S = float(np.sum(fy**a))
        u = wy @ fy ** (a - 1)
        block = (wy * fy ** (a - 2)) @ wy.T - np.outer(u, u) / S
        H += (a - 1) * S ** (1 / a - 1) * block
    return H


def h_bounds(nx: int, op: OrderParam) -> tuple[float, float]:
    """Range of h(P) over PMFs with |X| = nx."""
    op = _as_order(op)
    edge = nx ** ((1 - op.alpha) / op.alpha)
    return (1.0, edge) if op.alpha < 1 else (edge, 1.0)


__all__ = [
    "TiltedConditional",
    "f_divergence",
    "h_bounds",
    "h_gradient",
    "h_hessian",
    "h_value",
    "i_from_l",
    "i_value",
    "kl_divergence",
    "kl_limit_check",
    "l_alpha",
    "l_from_i",
    "log_h",
    "renyi_divergence",
    "renyi_entropy",
    "shannon_entropy",
    "side_weights",
    "tilt",
]

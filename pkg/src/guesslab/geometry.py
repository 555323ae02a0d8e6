"""L_alpha-balls, projections onto polytopes of PMFs, and Pythagorean checks.

L_alpha(P, R) is quasiconvex in P, so the projection of R onto a convex hull is found
by bisection on the level r: the sublevel set {L_alpha(., R) <= r} meets the hull iff

    phi(w) = sign(rho) * (t h(V w) - lin(V w)) >= 0   for some hull weights w,

with lin(P) = sum P R'^(-rho) linear and t = exp(rho r) (up to a common scale).  phi is
concave in w for both ranges of alpha, so each feasibility test is a Frank-Wolfe run.
After bisection a Dinkelbach refinement (the same subproblem with t set to the current
ratio lin / h) drives the point to full precision, which the Pythagorean checks need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import nnls
from scipy.special import logsumexp

from ._simplex import maximize_on_simplex
from .center import CenterResult, FamilySpec
from .infomeasures import h_gradient, h_hessian, l_alpha, log_cross
from .probkit import Alphabet, JointPmf, LogBase, OrderParam, common_alphabet

MAX_VERTICES = 16
HULL_TOL = 1e-9
BISECTION_TOL = 1e-7
INNER_TOL = 1e-9
POLISH_TOL = 1e-14
INNER_MAX_ITER = 2_000
POLISH_ROUNDS = 60


# ---------------------------------------------------------------- hulls


def hull_weights(target: np.ndarray, vertices: np.ndarray) -> tuple[np.ndarray, float]:
    """Convex weights w minimizing ||vertices^T w - target||; returns (w, max-norm residual).

    Nonnegative least squares with the sum-to-one constraint appended as a heavily
    weighted extra equation.
    """
    V = np.asarray(vertices, dtype=float).reshape(len(vertices), -1)
    q = np.asarray(target, dtype=float).ravel()
    big = 1e3 * max(1.0, float(np.abs(V).max()))
    A = np.vstack([V.T, np.full((1, len(V)), big)])
    b = np.concatenate([q, [big]])
    w, _ = nnls(A, b)
    if w.sum() > 0:
        w = w / w.sum()
    return w, float(np.max(np.abs(V.T @ w - q)))


@dataclass(frozen=True, eq=False)
class ConvexHullSet:
    """Convex hull of at most 16 PMFs on a common alphabet."""

    vertices: tuple

    def __post_init__(self):
        vs = tuple(self.vertices)
        if not 1 <= len(vs) <= MAX_VERTICES:
            raise ValueError(f"need between 1 and {MAX_VERTICES} vertices")
        common_alphabet(vs)
        object.__setattr__(self, "vertices", vs)

    @property
    def alphabet(self) -> Alphabet:
        return self.vertices[0].alphabet

    @property
    def k(self) -> int:
        return len(self.vertices)

    def stacked(self) -> np.ndarray:
        """Vertex masses, shape (k, |Y|, |X|)."""
        return np.stack([v.mass for v in self.vertices])

    def point(self, w) -> JointPmf:
        w = np.asarray(w, dtype=float)
        m = np.tensordot(w / w.sum(), self.stacked(), axes=1)
        m[m < 0] = 0.0
        return JointPmf(self.alphabet, m / m.sum())

    def weights_of(self, p: JointPmf) -> tuple[np.ndarray, float]:
        return hull_weights(p.mass, self.stacked())

    def contains(self, p: JointPmf, tol: float = HULL_TOL) -> bool:
        return self.weights_of(p)[1] <= tol

    def contains_hull(self, other: "ConvexHullSet", tol: float = HULL_TOL) -> bool:
        return all(self.contains(v, tol) for v in other.vertices)


def in_ball(p: JointPmf, r_center: JointPmf, r: float, op: OrderParam, base=LogBase.BITS) -> bool:
    """True iff L_alpha(P, R) < r."""
    if not r > 0:
        raise ValueError("ball radius must be positive")
    return l_alpha(p, r_center, op, base) < r


# ---------------------------------------------------------------- projection


class ProjectionUndefined(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    q: JointPmf
    value: float
    weights: np.ndarray
    certificate: np.ndarray  # Pythagorean slack per vertex
    bisection_steps: int = 0
    polish_rounds: int = 0
    base: LogBase = LogBase.BITS


class _LevelProblem:
    """lin(w) = c.w and h(w) = h(sum_j w_j V_j) on the usable vertices of a hull."""

    def __init__(self, hull: ConvexHullSet, r_pmf: JointPmf, op: OrderParam):
        self.op = op
        self.alpha = op.alpha
        V = hull.stacked()
        logc = np.array([log_cross(v, r_pmf, op) for v in hull.vertices])
        # rho > 0: a vertex with lin = inf makes every mixture using it infinite
        usable = np.isfinite(logc) if op.rho > 0 else np.ones(len(logc), dtype=bool)
        finite_l = np.isfinite(logc) & (logc > -np.inf)
        if not np.any(finite_l):
            raise ProjectionUndefined("projection undefined: every vertex is at infinite divergence from R")
        self.index = np.flatnonzero(usable)
        self.V = V[usable]
        self.shift = float(np.max(logc[finite_l]))
        self.c = np.exp(logc[usable] - self.shift)
        with np.errstate(divide="ignore"):
            self.log_h_v = logsumexp(logsumexp(self.alpha * np.log(self.V), axis=2) / self.alpha, axis=1)

    def mix(self, w: np.ndarray) -> np.ndarray:
        return np.tensordot(w, self.V, axes=1)

    def log_h(self, w: np.ndarray) -> float:
        a = self.alpha
        with np.errstate(divide="ignore"):
            rows = logsumexp(a * np.log(self.mix(w)), axis=1) / a
        return float(logsumexp(rows))

    def value_nats(self, w: np.ndarray) -> float:
        lin = float(self.c @ w)
        if lin <= 0:
            return math.inf
        return (math.log(lin) + self.shift - self.log_h(w)) / self.op.rho

    def theta(self, level_nats: float) -> float:
        return self.op.rho * level_nats - self.shift

    def phi(self, w: np.ndarray, theta: float) -> float:
        return self.op.sign * (math.exp(theta + self.log_h(w)) - float(self.c @ w))

    def grad(self, w: np.ndarray, theta: float) -> np.ndarray:
        g = h_gradient(self.V, self.mix(w), self.alpha)
        return self.op.sign * (math.exp(theta) * g - self.c)

    def hess(self, w: np.ndarray, theta: float) -> np.ndarray:
        act = w > 0
        out = np.zeros((w.size, w.size))
        H = h_hessian(self.V[act], self.mix(w), self.alpha)
        out[np.ix_(act, act)] = self.op.sign * math.exp(theta) * H
        return out

    def maximize(self, w0: np.ndarray, theta: float, tol: float, stop=None):
        return maximize_on_simplex(
            lambda w: self.phi(w, theta),
            lambda w: self.grad(w, theta),
            w0,
            tol,
            max_iter=INNER_MAX_ITER,
            stop=stop,
            hess=lambda w: self.hess(w, theta),
        )


def project(
    r_pmf: JointPmf,
    hull: ConvexHullSet,
    op: OrderParam,
    tol: float = BISECTION_TOL,
    base=LogBase.BITS,
    w0: Sequence[float] | None = None,
) -> ProjectionResult:
    """L_alpha-projection of R onto ``hull``: argmin over P in the hull of L_alpha(P, R).

    ``tol`` is the bisection tolerance on the level (in ``base`` units); ``w0`` seeds
    the search with hull weights instead of the best vertex.
    """
    if r_pmf.alphabet != hull.alphabet:
        raise ValueError("R and the hull must share an alphabet")
    b = LogBase.coerce(base)
    prob = _LevelProblem(hull, r_pmf, op)
    k = len(prob.index)

    vertex_values = np.array([prob.value_nats(np.eye(k)[j]) for j in range(k)])
    best = np.eye(k)[int(np.argmin(vertex_values))]
    if w0 is not None:
        start = np.asarray(w0, dtype=float)[prob.index]
        if start.sum() > 0 and math.isfinite(prob.value_nats(start / start.sum())):
            best = start / start.sum()
    hi = prob.value_nats(best)
    lo = 0.0
    tol_nats = tol * math.log(b.value)

    steps = 0
    while hi - lo > tol_nats:
        steps += 1
        mid = 0.5 * (lo + hi)
        theta = prob.theta(mid)

        def decided(state, theta=theta):
            v = prob.phi(state.x, theta)
            return v >= 0 or v + state.gap < 0

        state = prob.maximize(best, theta, INNER_TOL, stop=decided)
        if prob.phi(state.x, theta) >= 0:
            best = state.x
            hi = min(mid, prob.value_nats(best))
        else:
            lo = mid

    rounds = 0
    value = prob.value_nats(best)
    for rounds in range(1, POLISH_ROUNDS + 1):
        theta = math.log(float(prob.c @ best)) - prob.log_h(best)
        state = prob.maximize(best, theta, POLISH_TOL)
        new_value = prob.value_nats(state.x)
        if not new_value < value:
            break
        best, value = state.x, new_value

    weights = np.zeros(hull.k)
    weights[prob.index] = best
    q = hull.point(weights)
    value_base = l_alpha(q, r_pmf, op, b)
    slack = np.array([_slack(v, q, r_pmf, op, b) for v in hull.vertices])
    return ProjectionResult(q, value_base, weights, slack, steps, rounds, b)


def _slack(p: JointPmf, q: JointPmf, r: JointPmf, op: OrderParam, base: LogBase) -> float:
    lpr = l_alpha(p, r, op, base)
    if lpr == math.inf:
        return math.inf
    return lpr - l_alpha(p, q, op, base) - l_alpha(q, r, op, base)


def pythagorean_residual(p: JointPmf, q: JointPmf, r: JointPmf, op: OrderParam, base=LogBase.BITS) -> float:
    """L_alpha(P, R) - L_alpha(P, Q) - L_alpha(Q, R); all three terms must be finite."""
    terms = {
        "L(P,R)": l_alpha(p, r, op, base),
        "L(P,Q)": l_alpha(p, q, op, base),
        "L(Q,R)": l_alpha(q, r, op, base),
    }
    bad = [name for name, v in terms.items() if not math.isfinite(v)]
    if bad:
        raise ValueError("infinite divergence in " + ", ".join(bad))
    return terms["L(P,R)"] - terms["L(P,Q)"] - terms["L(Q,R)"]


# ---------------------------------------------------------------- transitivity and center


@dataclass(frozen=True)
class TransitivityResult:
    status: str  # "pass", "fail" or "skipped"
    reason: str = ""
    distance: float = math.nan

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def __bool__(self):
        return self.passed


def transitivity_check(
    r_pmf: JointPmf,
    outer: ConvexHullSet,
    inner: ConvexHullSet,
    op: OrderParam,
    tol: float = 1e-6,
) -> TransitivityResult:
    """Projecting R onto ``inner`` equals projecting Q = proj(R, outer) onto ``inner``.

    The statement assumes ``inner`` lies in ``outer`` and that the Pythagorean
    identity holds with equality on ``outer``; when either fails the check is skipped.
    """
    if not outer.contains_hull(inner):
        return TransitivityResult("skipped", "inner hull is not contained in the outer hull")
    proj = project(r_pmf, outer, op)
    worst = float(np.max(np.abs(proj.certificate)))
    if not worst <= tol:
        return TransitivityResult(
            "skipped", f"Pythagorean equality fails on the outer hull (max |slack| {worst:.2e})"
        )
    via_q = project(proj.q, inner, op).q
    direct = project(r_pmf, inner, op).q
    dist = via_q.max_distance(direct)
    return TransitivityResult("pass" if dist <= tol else "fail", "", dist)


def center_in_hull_check(fam: FamilySpec, res: CenterResult, op: OrderParam | None = None) -> float:
    """Max-norm distance from Q* to the closest convex combination of the members."""
    return hull_weights(res.q_star.mass, np.stack([p.mass for p in fam.members]))[1]


__all__ = [
    "ConvexHullSet",
    "ProjectionResult",
    "ProjectionUndefined",
    "TransitivityResult",
    "center_in_hull_check",
    "hull_weights",
    "in_ball",
    "project",
    "pythagorean_residual",
    "transitivity_check",
]

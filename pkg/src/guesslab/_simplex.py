"""Frank-Wolfe with away steps and optional Newton steps on the active face.

Maximizes a concave function over the probability simplex.  The Frank-Wolfe gap
max_i g_i - g.x is an upper bound on f* - f(x) and is the stopping certificate;
the Newton face steps only accelerate the final approach.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

SLOPE_XTOL = 1e-15
NEWTON_DAMPING = 1e-6
SLOPE_CAP = 1e300


@dataclass
class FWState:
    x: np.ndarray
    value: float
    gap: float
    iterations: int
    converged: bool


def _slope(grad: Callable, x: np.ndarray, d: np.ndarray) -> float:
    g = grad(x)
    nz = d != 0
    with np.errstate(invalid="ignore"):
        s = float(np.sum(g[nz] * d[nz]))
    if math.isnan(s):
        # +inf and -inf slopes together only happen on degenerate faces
        return 0.0
    # root finding needs finite values; an infinite slope only carries its sign
    return float(np.clip(s, -SLOPE_CAP, SLOPE_CAP))


def line_search(grad: Callable, x: np.ndarray, d: np.ndarray, tmax: float) -> float:
    """Step in [0, tmax] where the directional derivative of a concave function vanishes.

    Root finding on the derivative keeps full precision in the step, which a
    value-comparison search loses once the objective is flat to rounding.
    """
    if tmax <= 0:
        return 0.0
    end = _slope(grad, x + tmax * d, d)
    if end >= 0:
        return tmax
    start = _slope(grad, x, d)
    if start <= 0:
        return 0.0
    return brentq(lambda t: _slope(grad, x + t * d, d), 0.0, tmax, xtol=SLOPE_XTOL)


def _gap(g: np.ndarray, x: np.ndarray) -> tuple[float, int, float]:
    active = x > 0
    with np.errstate(invalid="ignore"):
        gx = float(np.sum(g[active] * x[active]))
    s = int(np.argmax(g))
    return float(g[s] - gx), s, gx


def _clean(x: np.ndarray) -> np.ndarray:
    x[x < 0] = 0.0
    return x / x.sum()


def _newton_direction(g: np.ndarray, H: np.ndarray, active: np.ndarray) -> np.ndarray | None:
    """Maximizer of the damped quadratic model on the active face (sum of the step = 0).

    The Hessian is singular whenever the face has more vertices than the objective
    has effective dimensions (and along scaling directions of homogeneous objectives),
    so a small multiple of the identity is subtracted; the step then runs to the
    boundary along flat directions and the face shrinks.
    """
    idx = np.flatnonzero(active)
    k = idx.size
    if k < 2:
        return None
    hf = H[np.ix_(idx, idx)]
    damp = NEWTON_DAMPING * max(float(np.max(np.abs(np.diag(hf)))), np.finfo(float).tiny)
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = hf - damp * np.eye(k)
    kkt[:k, k] = kkt[k, :k] = 1.0
    rhs = np.concatenate([-g[idx], [0.0]])
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError:
        return None
    d = np.zeros_like(g)
    d[idx] = sol[:k]
    d[idx] -= d[idx].mean()  # keep exactly on the face
    if not np.all(np.isfinite(d)):
        return None
    with np.errstate(invalid="ignore"):
        if not float(g[idx] @ d[idx]) > 0:
            return None
    return d


def _newton_step(grad, hess, x: np.ndarray, g: np.ndarray) -> np.ndarray:
    d = _newton_direction(g, hess(x), x > 0)
    if d is None:
        return x
    ratio = np.full(x.shape, np.inf)
    neg = d < 0
    ratio[neg] = -x[neg] / d[neg]
    j = int(np.argmin(ratio))
    tmax = min(1.0, float(ratio[j]))
    t = line_search(grad, x, d, tmax)
    if t <= 0:
        return x
    y = x + t * d
    if t == tmax and tmax < 1.0:
        y[j] = 0.0  # blocking coordinate leaves the face
    return _clean(y)


def maximize_on_simplex(
    f: Callable[[np.ndarray], float],
    grad: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    tol: float,
    max_iter: int = 100_000,
    stop: Callable[[FWState], bool] | None = None,
    hess: Callable[[np.ndarray], np.ndarray] | None = None,
) -> FWState:
    """Maximize concave ``f`` on the simplex; stops when the Frank-Wolfe gap <= tol.

    ``stop`` may end the run early (used by feasibility tests that only need the
    sign of the optimum).  With ``hess`` each iteration adds one Newton step on the
    face spanned by the current support.
    """
    x = _clean(np.array(x0, dtype=float))
    it = 0
    for it in range(1, max_iter + 1):
        g = grad(x)
        gap, s, gx = _gap(g, x)
        state = FWState(x, math.nan, gap, it, gap <= tol)
        if gap <= tol or (stop is not None and stop(state)):
            state.value = f(x)
            return state

        act_idx = np.flatnonzero(x > 0)
        v = int(act_idx[np.argmin(g[act_idx])])
        away = (gx - g[v]) > gap and x[v] < 1.0
        if away:
            d = x.copy()
            d[v] -= 1.0
            tmax = x[v] / (1.0 - x[v])
        else:
            d = -x.copy()
            d[s] += 1.0
            tmax = 1.0
        step = line_search(grad, x, d, tmax)
        x_new = x + step * d
        if away and step == tmax:
            x_new[v] = 0.0  # drop step
        x_new = _clean(x_new)
        if hess is not None:
            x_new = _newton_step(grad, hess, x_new, grad(x_new))
        if step <= 0 and np.array_equal(x_new, x):
            break
        x = x_new
    g = grad(x)
    gap, _, _ = _gap(g, x)
    return FWState(x, f(x), gap, it, gap <= tol)

"""Shared strategies and small constructors for the test suite."""

import numpy as np
from hypothesis import strategies as st

from guesslab.probkit import Alphabet, JointPmf, OrderParam

ALPHAS = (0.3, 0.5, 0.7, 1.5, 2.0, 3.0)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
orders = st.sampled_from(ALPHAS).map(OrderParam)


def pmf(values) -> JointPmf:
    m = np.atleast_2d(np.asarray(values, dtype=float))
    return JointPmf.from_array(m)


def dirichlet(rng, nx, ny=1, sparse=False) -> JointPmf:
    m = rng.dirichlet(np.ones(nx * ny)).reshape(ny, nx)
    if sparse and nx * ny > 1:
        m[rng.random(m.shape) < 0.3] = 0.0
        if m.sum() == 0:
            m.flat[0] = 1.0
    return JointPmf(Alphabet.of_size(nx, ny), m / m.sum())


@st.composite
def joint_pmfs(draw, max_x=5, max_y=2, sparse=False):
    nx = draw(st.integers(1, max_x))
    ny = draw(st.integers(1, max_y))
    return dirichlet(np.random.default_rng(draw(seeds)), nx, ny, sparse)


@st.composite
def pmf_pairs(draw, max_x=5, max_y=2):
    nx = draw(st.integers(2, max_x))
    ny = draw(st.integers(1, max_y))
    rng = np.random.default_rng(draw(seeds))
    return dirichlet(rng, nx, ny), dirichlet(rng, nx, ny)


def simplex_grid(nx: int, step: float) -> np.ndarray:
    """All PMFs on nx letters whose entries are multiples of ``step``."""
    k = round(1 / step)
    if nx == 1:
        return np.ones((1, 1))
    if nx == 2:
        i = np.arange(k + 1)
        return np.stack([i, k - i], axis=1) / k
    if nx == 3:
        i, j = np.meshgrid(np.arange(k + 1), np.arange(k + 1), indexing="ij")
        keep = i + j <= k
        i, j = i[keep], j[keep]
        return np.stack([i, j, k - i - j], axis=1) / k
    raise ValueError("grid oracle supports at most 3 letters")


def grid_l_alpha(p: np.ndarray, qs: np.ndarray, alpha: float) -> np.ndarray:
    """L_alpha(P, Q) in bits for one PMF row P against many candidate rows Q."""
    rho = (1 - alpha) / alpha
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        qt = qs**alpha / np.sum(qs**alpha, axis=1, keepdims=True)
        terms = np.where(p > 0, p * qt ** (-rho), 0.0)
        cross = terms.sum(axis=1)
        return (np.log2(cross) - np.log2(np.sum(p**alpha) ** (1 / alpha))) / rho


def grid_radius(members: np.ndarray, alpha: float, step: float = 0.005) -> float:
    """min over a grid of Q of max_i L_alpha(P_i, Q), |Y| = 1.

    L_alpha depends on Q only through its tilt Q', so the candidates are the union
    of a grid in Q and a grid in Q' (mapped back by Q proportional to Q'^(1/alpha)).
    """
    nx = members.shape[1]
    g = simplex_grid(nx, step)
    back = g ** (1 / alpha)
    cands = np.concatenate([g, back / back.sum(axis=1, keepdims=True)])
    worst = np.max([grid_l_alpha(p, cands, alpha) for p in members], axis=0)
    return float(np.nanmin(worst))


def l_alpha_rows(ps: np.ndarray, r: np.ndarray, alpha: float) -> np.ndarray:
    """L_alpha(P, R) in bits for many PMF rows P against one R, |Y| = 1."""
    rho = (1 - alpha) / alpha
    rt = r**alpha / np.sum(r**alpha)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        v = rt ** (-rho)
        cross = np.sum(np.where(ps > 0, ps * v, 0.0), axis=1)
        norm = np.sum(ps**alpha, axis=1) ** (1 / alpha)
        return (np.log2(cross) - np.log2(norm)) / rho


def grid_projection(vertices: np.ndarray, r: np.ndarray, alpha: float, step: float = 0.002) -> float:
    """min over barycentric grid weights w of L_alpha(w V, R)."""
    w = simplex_grid(len(vertices), step)
    return float(np.nanmin(l_alpha_rows(w @ vertices, r, alpha)))


def inner_point_fixture(p: np.ndarray, s: np.ndarray, alpha: float, lam: float = 0.4, seed: int = 0):
    """R whose L_alpha-projection onto the segment [P, S] is Q = lam P + (1 - lam) S.

    Stationarity along a = P - S at Q reads (a - kappa Q) . v = 0 with v = R'^(-rho)
    and kappa = sum a Q^(alpha-1) / sum Q^alpha; pick v > 0 in that hyperplane and
    undo the tilt.
    """
    rho = (1 - alpha) / alpha
    q = lam * p + (1 - lam) * s
    a = p - s
    kappa = np.sum(a * q ** (alpha - 1)) / np.sum(q**alpha)
    b = a - kappa * q
    rng = np.random.default_rng(seed)
    while True:
        v0 = 1 + 0.3 * rng.random(len(p))
        v = v0 - (b @ v0) / (b @ b) * b
        if np.all(v > 0):
            break
    rt = v ** (-1 / rho)
    r = rt ** (1 / alpha)
    return q, r / r.sum()


ACCEPTANCE_LINES: list = []


def report(number: int, ok: bool, detail: str) -> str:
    """Record and print one pass/fail line for an acceptance criterion."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line

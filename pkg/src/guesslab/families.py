"""Worked uncertainty sets: discrete memoryless sources and finite-state arbitrarily varying sources.

Strings of length n over a letter alphabet are the symbols of a product alphabet
(see :meth:`Alphabet.product`), so every PMF here is an ordinary :class:`JointPmf`
with ``|Y| = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .center import CenterResult, FamilySpec, _Objective, _result
from .infomeasures import kl_divergence, renyi_entropy, tilt, i_from_l
from .probkit import Alphabet, GuessingList, JointPmf, LogBase, OrderParam, sort_to_list

ENUMERATION_CAP = 2_000_000
ENTROPY_DIGITS = 12


def _check_cap(count: int, cap: int):
    if count > cap:
        raise ValueError(f"enumeration of {count} items exceeds cap {cap}")


def compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """All k-tuples of nonnegative integers summing to n, in descending lexicographic order."""
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


def multiset_permutations(counts: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Sequences over symbols 0..k-1 with the given counts, in lexicographic order."""
    counts = list(counts)
    n = sum(counts)
    seq: list[int] = []

    def rec():
        if len(seq) == n:
            yield tuple(seq)
            return
        for s, c in enumerate(counts):
            if c:
                counts[s] -= 1
                seq.append(s)
                yield from rec()
                seq.pop()
                counts[s] += 1

    yield from rec()


def type_class_size(counts: Sequence[int]) -> int:
    """Multinomial coefficient n! / prod(c!)."""
    size = math.factorial(sum(counts))
    for c in counts:
        size //= math.factorial(c)
    return size


def _letter_counts(nm: int, n: int) -> np.ndarray:
    """counts[j, a] = occurrences of letter a in the j-th string (lexicographic order)."""
    digits = np.array(np.unravel_index(np.arange(nm**n), (nm,) * n)).T
    return np.stack([(digits == a).sum(axis=1) for a in range(nm)], axis=1)


# ---------------------------------------------------------------- DMS


@dataclass(frozen=True)
class DmsSpec:
    letters: tuple
    n: int
    p: tuple | None = None
    cap: int = ENUMERATION_CAP

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(str(a) for a in self.letters))
        if len(self.letters) < 2 or self.n < 1:
            raise ValueError("need at least two letters and n >= 1")
        if self.p is not None:
            p = tuple(float(v) for v in self.p)
            if len(p) != len(self.letters) or min(p) < 0 or abs(sum(p) - 1) > 1e-12:
                raise ValueError("p must be a PMF on the letters")
            object.__setattr__(self, "p", p)

    @property
    def m(self) -> int:
        return len(self.letters)

    def alphabet(self) -> Alphabet:
        _check_cap(self.m**self.n, self.cap)
        return Alphabet.product(self.letters, self.n)


def iid_pmf(letters: Sequence[str], p: Sequence[float], n: int, cap: int = ENUMERATION_CAP) -> JointPmf:
    """P_n(x^n) = prod_i p(x_i) on the product alphabet."""
    p = np.asarray(p, dtype=float)
    _check_cap(len(p) ** n, cap)
    counts = _letter_counts(len(p), n)
    with np.errstate(divide="ignore", invalid="ignore"):
        logm = np.where(counts > 0, counts * np.log(p)[None, :], 0.0).sum(axis=1)
    mass = np.exp(logm)
    return JointPmf(Alphabet.product(letters, n), mass / mass.sum())


def empirical_entropy_list(spec: DmsSpec) -> GuessingList:
    """Universal list: ascending empirical entropy of the type.

    Types of equal entropy are ordered by descending count vector (so the type of the
    lexicographically smallest string comes first); strings within a type are lexicographic.
    """
    alphabet = spec.alphabet()
    counts = _letter_counts(spec.m, spec.n)
    freq = counts / spec.n
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = -np.sum(np.where(freq > 0, freq * np.log(freq), 0.0), axis=1)
    ent = np.round(ent, ENTROPY_DIGITS)
    keys = [np.arange(len(ent))] + [-counts[:, a] for a in reversed(range(spec.m))] + [ent]
    order = np.lexsort(keys)
    return GuessingList.from_orders(alphabet, [order])


@dataclass(frozen=True)
class RadiusBound:
    """Asymptotic upper bound on the DMS radius; the o(1) term is not included."""

    m: int
    n: int
    value: float
    base: LogBase
    epsilon_omitted: bool = True

    @property
    def note(self) -> str:
        return "vanishing correction term omitted"


def dms_radius_bound(m: int, n: int, base=LogBase.BITS) -> RadiusBound:
    """(m-1)/2 log(n / 2 pi) + log(Gamma(1/2)^m / Gamma(m/2))."""
    if m < 2 or n < 1:
        raise ValueError("need m >= 2 and n >= 1")
    b = LogBase.coerce(base)
    u_m = m * math.lgamma(0.5) - math.lgamma(m / 2)
    nats = 0.5 * (m - 1) * math.log(n / (2 * math.pi)) + u_m
    return RadiusBound(m, n, b.from_nats(nats), b)


def jensen_lower_bound(p: JointPmf, q: JointPmf, op: OrderParam, base=LogBase.BITS) -> float:
    """D(P' || Q'), the KL divergence between the tilted PMFs; L_alpha(P, Q) is at least this."""
    if not op.rho > 0:
        raise ValueError("the Jensen step needs rho > 0")
    if p.ny != 1 or q.ny != 1:
        raise ValueError("jensen_lower_bound is defined without side information")
    return kl_divergence(tilt(p, op).row(0), tilt(q, op).row(0), base)


def dms_grid_family(n: int, step: float = 0.02, cap: int = ENUMERATION_CAP) -> FamilySpec:
    """Binary i.i.d. sources with P(1) on the grid 0, step, ..., 1 (a finite stand-in for all DMSs)."""
    k = round(1 / step)
    if not math.isclose(k * step, 1.0):
        raise ValueError("grid step must divide 1")
    return FamilySpec([iid_pmf(("0", "1"), (1 - j / k, j / k), n, cap) for j in range(k + 1)])


# ---------------------------------------------------------------- list stitching


@dataclass(frozen=True, eq=False)
class StitchedList:
    component_lists: tuple
    merged: GuessingList

    @property
    def N(self) -> int:
        return len(self.component_lists)

    def bound_holds(self) -> bool:
        """G(x) <= N * G_k(x) for every x and k (integer check)."""
        return all(bool(np.all(self.merged.rank <= self.N * g.rank)) for g in self.component_lists)


def stitch_lists(lists: Sequence[GuessingList]) -> StitchedList:
    """Raster interleave: first guesses of every list, then second guesses, ..., skipping repeats."""
    lists = tuple(lists)
    if not lists:
        raise ValueError("need at least one list")
    alphabet = lists[0].alphabet
    if any(g.alphabet != alphabet for g in lists):
        raise ValueError("all lists must share an alphabet")
    orders = []
    for y in range(alphabet.ny):
        columns = np.stack([g.order(y) for g in lists], axis=1).ravel()  # raster order
        _, first = np.unique(columns, return_index=True)
        orders.append(columns[np.sort(first)])
    return StitchedList(lists, GuessingList.from_orders(alphabet, orders))


def binary_two_list(n: int) -> StitchedList:
    """Stitch the two candidate optimal lists for binary i.i.d. sources.

    Component 0 guesses strings with many ones first (optimal when P(1) >= 1/2),
    component 1 guesses strings with few ones first (optimal when P(1) <= 1/2).
    """
    if not 1 <= n <= 20:
        raise ValueError("n must be between 1 and 20")
    alphabet = Alphabet.product(("0", "1"), n)
    ones = _letter_counts(2, n)[:, 1]
    asc = np.lexsort((np.arange(2**n), ones))
    return stitch_lists(
        [GuessingList.from_orders(alphabet, [asc[::-1]]), GuessingList.from_orders(alphabet, [asc])]
    )


# ---------------------------------------------------------------- AVS


@dataclass(frozen=True, eq=False)
class AvsSpec:
    """Letters drawn independently with law channel[s_i] given an adversarial state sequence."""

    states: tuple
    letters: tuple
    channel: np.ndarray
    n: int
    counts: tuple = field(default=())
    cap: int = ENUMERATION_CAP

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))
        object.__setattr__(self, "letters", tuple(str(a) for a in self.letters))
        w = np.array(self.channel, dtype=float)
        if w.shape != (len(self.states), len(self.letters)):
            raise ValueError("channel must have one row per state and one column per letter")
        if np.any(w < 0) or np.any(np.abs(w.sum(axis=1) - 1) > 1e-12):
            raise ValueError("channel rows must be PMFs")
        w.setflags(write=False)
        object.__setattr__(self, "channel", w)
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.counts:
            c = tuple(int(v) for v in self.counts)
            if len(c) != len(self.states) or min(c) < 0 or sum(c) != self.n:
                raise ValueError("type counts must be nonnegative, one per state, summing to n")
            object.__setattr__(self, "counts", c)

    def with_counts(self, counts: Sequence[int]) -> "AvsSpec":
        return AvsSpec(self.states, self.letters, self.channel, self.n, tuple(counts), self.cap)

    def alphabet(self) -> Alphabet:
        return Alphabet.product(self.letters, self.n)

    def all_types(self) -> list[tuple[int, ...]]:
        return list(compositions(self.n, len(self.states)))


def avs_conditional(spec: AvsSpec, states: Sequence[int]) -> JointPmf:
    """P_n(x^n | s^n) = prod_i channel[s_i, x_i]."""
    nm = len(spec.letters)
    digits = np.array(np.unravel_index(np.arange(nm**spec.n), (nm,) * spec.n))  # [n, strings]
    with np.errstate(divide="ignore"):
        logw = np.log(spec.channel)
    mass = np.exp(logw[np.asarray(states)[:, None], digits].sum(axis=0))
    return JointPmf(spec.alphabet(), mass / mass.sum())


def avs_type_members(spec: AvsSpec) -> FamilySpec:
    """One member per state sequence of the type class, in lexicographic order."""
    if not spec.counts:
        raise ValueError("AvsSpec needs type counts")
    _check_cap(type_class_size(spec.counts) * len(spec.letters) ** spec.n, spec.cap)
    return FamilySpec([avs_conditional(spec, s) for s in multiset_permutations(spec.counts)])


def _require_alpha_below_one(op: OrderParam):
    if not op.alpha < 1:
        raise ValueError("closed form is established only for 0 < alpha < 1")


def avs_center_radius(spec: AvsSpec, op: OrderParam, base=LogBase.BITS) -> CenterResult:
    """Closed-form center (uniform mixture of the type class) and radius
    R_n = H_alpha(Q*) - mean_i H_alpha(P_i)."""
    _require_alpha_below_one(op)
    b = LogBase.coerce(base)
    fam = avs_type_members(spec)
    m = fam.size
    q = JointPmf(fam.alphabet, np.mean([p.mass for p in fam.members], axis=0))
    radius = renyi_entropy(q, op, b) - float(np.mean([renyi_entropy(p, op, b) for p in fam.members]))
    res = _result(_Objective(fam, op), fam, np.full(m, 1.0 / m), 0, b)
    k_minus = i_from_l(radius, op, b)
    return CenterResult(
        mu_star=res.mu_star,
        q_star=q,
        radius_C=radius,
        k_plus=res.k_plus,
        k_minus=k_minus,
        nasc_residuals=k_minus - (res.k_minus - res.nasc_residuals),
        normalizer_d=res.normalizer_d,
        iterations=0,
        base=b,
    )


def avs_stitched_list(spec: AvsSpec, op: OrderParam) -> tuple[StitchedList, list[tuple[int, ...]]]:
    """Stitch the center lists of every state type; returns the list and the type order used."""
    types = spec.all_types()
    lists = [sort_to_list(avs_center_radius(spec.with_counts(c), op).q_star) for c in types]
    return stitch_lists(lists), types


def avs_stitch_bound(spec: AvsSpec, radius: float, base=LogBase.BITS) -> float:
    """R_n(T_U) + log(1 + n ln|A|) + |S| log(n + 1)."""
    b = LogBase.coerce(base)
    extra = math.log1p(spec.n * math.log(len(spec.letters))) + len(spec.states) * math.log(spec.n + 1)
    return radius + b.from_nats(extra)


def avs_rate(channel, u_star, op: OrderParam, base=LogBase.BITS) -> float:
    """R = H_alpha(V*) - sum_s U*(s) H_alpha(P(.|s)), V* = U* channel."""
    _require_alpha_below_one(op)
    w = np.asarray(channel, dtype=float)
    u = np.asarray(u_star, dtype=float)
    if w.ndim != 2 or u.shape != (w.shape[0],) or abs(u.sum() - 1) > 1e-12 or np.any(u < 0):
        raise ValueError("u_star must be a PMF over the channel rows")
    v = JointPmf.from_array(u @ w, normalize=True)
    rows = [renyi_entropy(JointPmf.from_array(r, normalize=True), op, base) for r in w]
    return renyi_entropy(v, op, base) - float(u @ np.array(rows))


__all__ = [
    "AvsSpec",
    "DmsSpec",
    "RadiusBound",
    "StitchedList",
    "avs_center_radius",
    "avs_conditional",
    "avs_rate",
    "avs_stitch_bound",
    "avs_stitched_list",
    "avs_type_members",
    "binary_two_list",
    "compositions",
    "dms_grid_family",
    "dms_radius_bound",
    "empirical_entropy_list",
    "iid_pmf",
    "jensen_lower_bound",
    "multiset_permutations",
    "stitch_lists",
    "type_class_size",
]

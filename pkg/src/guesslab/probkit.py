"""Probability containers on finite product alphabets, guessing lists and order parameters.

A joint PMF on X x Y is stored as an array of shape ``(|Y|, |X|)``: one row per
side-information symbol.  ``|Y| == 1`` means no side information.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

PMF_TOL = 1e-12
NO_SIDE_INFO = "·"


class LogBase(float, enum.Enum):
    """Logarithm base for reported entropies and divergences."""

    BITS = 2.0
    NATS = math.e

    @classmethod
    def coerce(cls, base: "LogBase | float | str") -> "LogBase":
        if isinstance(base, LogBase):
            return base
        if isinstance(base, str):
            key = base.strip().lower()
            if key in ("2", "bits", "bit"):
                return cls.BITS
            if key in ("e", "nats", "nat"):
                return cls.NATS
            raise ValueError(f"unknown log base {base!r}")
        if math.isclose(float(base), 2.0):
            return cls.BITS
        if math.isclose(float(base), math.e):
            return cls.NATS
        raise ValueError(f"log base must be 2 or e, got {base!r}")

    @property
    def label(self) -> str:
        return "bits" if self is LogBase.BITS else "nats"

    def from_nats(self, value: float) -> float:
        """Convert a value measured in nats to this base."""
        return value / math.log(self.value)

    def log(self, x):
        return np.log(x) / math.log(self.value)


def nuisance(size_x: int, base: "LogBase | float" = LogBase.BITS) -> float:
    """``log(1 + ln|X|)``: natural log inside, selected base outside."""
    return LogBase.coerce(base).from_nats(math.log1p(math.log(size_x)))


@dataclass(frozen=True)
class OrderParam:
    """The order alpha together with the guessing moment rho = (1 - alpha) / alpha."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (a > 0) or not math.isfinite(a):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha}")
        if a == 1.0:
            raise ValueError("alpha = 1 is excluded (use the KL limit)")
        object.__setattr__(self, "alpha", a)

    @classmethod
    def from_alpha(cls, alpha: float) -> "OrderParam":
        return cls(alpha)

    @classmethod
    def from_rho(cls, rho: float) -> "OrderParam":
        rho = float(rho)
        if not rho > -1 or rho == 0:
            raise ValueError(f"rho must satisfy rho > -1, rho != 0; got {rho}")
        return cls(1.0 / (1.0 + rho))

    @property
    def rho(self) -> float:
        return (1.0 - self.alpha) / self.alpha

    @property
    def sign(self) -> float:
        """sign(rho) == sign(1 - alpha)."""
        return 1.0 if self.alpha < 1 else -1.0


@dataclass(frozen=True)
class Alphabet:
    x: tuple
    y: tuple = (NO_SIDE_INFO,)

    def __post_init__(self):
        x, y = tuple(self.x), tuple(self.y)
        if not x or not y:
            raise ValueError("alphabet axes must be nonempty")
        if len(set(x)) != len(x) or len(set(y)) != len(y):
            raise ValueError("symbol labels must be unique within each axis")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def nx(self) -> int:
        return len(self.x)

    @property
    def ny(self) -> int:
        return len(self.y)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @classmethod
    def of_size(cls, nx: int, ny: int = 1) -> "Alphabet":
        ys = (NO_SIDE_INFO,) if ny == 1 else tuple(str(j) for j in range(ny))
        return cls(tuple(str(i) for i in range(nx)), ys)

    @classmethod
    def product(cls, letters: Sequence[str], n: int) -> "Alphabet":
        """Alphabet of all n-strings over ``letters``, lexicographic (mixed-radix) order."""
        sep = "" if all(len(str(a)) == 1 for a in letters) else "|"
        strings = tuple(sep.join(map(str, s)) for s in itertools.product(letters, repeat=n))
        return cls(strings)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Immutable PMF on ``alphabet.x`` x ``alphabet.y``; ``mass[y, x]``."""

    alphabet: Alphabet
    mass: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mass, dtype=float)
        if m.ndim == 1:
            m = m[None, :]
        if m.shape != self.alphabet.shape:
            raise ValueError(f"mass shape {m.shape} does not match alphabet {self.alphabet.shape}")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise ValueError("mass entries must be finite and nonnegative")
        total = m.sum()
        if abs(total - 1.0) > PMF_TOL:
            raise ValueError(f"mass sums to {total!r}, not 1 within {PMF_TOL}")
        object.__setattr__(self, "mass", _frozen(m))

    @classmethod
    def from_array(cls, mass, alphabet: Alphabet | None = None, normalize: bool = False) -> "JointPmf":
        m = np.asarray(mass, dtype=float)
        if m.ndim == 1:
            m = m[None, :]
        if normalize:
            m = m / m.sum()
        if alphabet is None:
            alphabet = Alphabet.of_size(m.shape[1], m.shape[0])
        return cls(alphabet, m)

    @classmethod
    def uniform(cls, alphabet: Alphabet) -> "JointPmf":
        return cls(alphabet, np.full(alphabet.shape, 1.0 / (alphabet.nx * alphabet.ny)))

    @property
    def nx(self) -> int:
        return self.alphabet.nx

    @property
    def ny(self) -> int:
        return self.alphabet.ny

    def support(self) -> np.ndarray:
        """Boolean mask of cells with positive mass."""
        return self.mass > 0

    def marginal_y(self) -> np.ndarray:
        return self.mass.sum(axis=1)

    def conditional(self) -> np.ndarray:
        """P(x | y) rows; rows with zero marginal are left as zeros."""
        my = self.marginal_y()[:, None]
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(my > 0, self.mass / np.where(my > 0, my, 1.0), 0.0)

    def vector(self) -> np.ndarray:
        return self.mass.ravel()

    def max_distance(self, other: "JointPmf") -> float:
        return float(np.max(np.abs(self.mass - other.mass)))

    def __eq__(self, other):
        if not isinstance(other, JointPmf):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.mass, other.mass)

    def __hash__(self):
        return hash((self.alphabet, self.mass.tobytes()))

    def __repr__(self):
        return f"JointPmf(x={self.alphabet.x!r}, y={self.alphabet.y!r}, mass={self.mass.tolist()!r})"


@dataclass(frozen=True, eq=False)
class GuessingList:
    """Guessing order with side information: ``rank[y, x]`` in 1..|X|, a bijection per y."""

    alphabet: Alphabet
    rank: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rank)
        if r.ndim == 1:
            r = r[None, :]
        if r.shape != self.alphabet.shape:
            raise ValueError(f"rank shape {r.shape} does not match alphabet {self.alphabet.shape}")
        r = r.astype(np.int64)
        expected = np.arange(1, self.alphabet.nx + 1)
        for row in r:
            if not np.array_equal(np.sort(row), expected):
                raise ValueError("each rank row must be a permutation of 1..|X|")
        object.__setattr__(self, "rank", _frozen(r))

    @classmethod
    def from_orders(cls, alphabet: Alphabet, orders: Iterable[Sequence[int]]) -> "GuessingList":
        """Build from per-y guessing orders given as sequences of x-indices (first guess first)."""
        rank = np.zeros(alphabet.shape, dtype=np.int64)
        for j, order in enumerate(orders):
            rank[j, np.asarray(order, dtype=np.int64)] = np.arange(1, alphabet.nx + 1)
        return cls(alphabet, rank)

    def order(self, y: int = 0) -> np.ndarray:
        """x-indices in guessing order for side information index y."""
        return np.argsort(self.rank[y], kind="stable")

    def __eq__(self, other):
        if not isinstance(other, GuessingList):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.rank, other.rank)

    def __hash__(self):
        return hash((self.alphabet, self.rank.tobytes()))

    def __repr__(self):
        return f"GuessingList(x={self.alphabet.x!r}, rank={self.rank.tolist()!r})"


def sort_to_list(p: JointPmf) -> GuessingList:
    """The list G_P: guess in decreasing order of P(., y), ties by alphabet index."""
    rank = np.empty(p.alphabet.shape, dtype=np.int64)
    for j, row in enumerate(p.mass):
        order = np.lexsort((np.arange(p.nx), -row))
        rank[j, order] = np.arange(1, p.nx + 1)
    return GuessingList(p.alphabet, rank)


def guess_rank_bound(g: GuessingList, q: JointPmf) -> bool:
    """Check G(x,y) <= #{a : Q(a,y) >= Q(x,y)} on every cell."""
    counts = (q.mass[:, None, :] >= q.mass[:, :, None]).sum(axis=2)
    return bool(np.all(g.rank <= counts))


def all_guessing_lists(alphabet: Alphabet):
    """Every guessing list on ``alphabet`` (|X|!^|Y| of them); for exhaustive oracles."""
    perms = list(itertools.permutations(range(alphabet.nx)))
    for combo in itertools.product(perms, repeat=alphabet.ny):
        yield GuessingList.from_orders(alphabet, combo)


def common_alphabet(pmfs: Sequence[JointPmf]) -> Alphabet:
    if not pmfs:
        raise ValueError("need at least one PMF")
    alpha = pmfs[0].alphabet
    for p in pmfs[1:]:
        if p.alphabet != alpha:
            raise ValueError("alphabet mismatch across PMFs")
    return alpha


def random_pmf(rng: np.random.Generator, nx: int, ny: int = 1, concentration: float = 1.0,
               alphabet: Alphabet | None = None) -> JointPmf:
    """Dirichlet-distributed joint PMF; handy for property sweeps."""
    m = rng.dirichlet(np.full(nx * ny, concentration)).reshape(ny, nx)
    m = m / m.sum()
    return JointPmf(alphabet or Alphabet.of_size(nx, ny), m)


__all__ = [
    "Alphabet",
    "GuessingList",
    "JointPmf",
    "LogBase",
    "OrderParam",
    "PMF_TOL",
    "all_guessing_lists",
    "common_alphabet",
    "guess_rank_bound",
    "nuisance",
    "random_pmf",
    "sort_to_list",
]

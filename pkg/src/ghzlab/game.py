"""The GHZ game, its n-fold repetition, and strategy evaluation.

One round: the verifier draws (x, y, z) uniformly from
S = {(x, y, z) in {0,1}^3 : x XOR y XOR z = 0} and accepts answers (a, b, c)
iff a XOR b XOR c = x OR y OR z.  The n-fold game plays n independent rounds
at once: questions are vectors, strategies are full truth tables
{0,1}^n -> {0,1}^n, and the verifier accepts only if every coordinate passes.

S is exactly the graph of XOR, so the question distribution is represented
throughout as (x, y) uniform over pairs with z = x XOR y; this also gives the
identity x OR y OR z = x OR y used by all the hot loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import limits
from .errors import DimensionError, ValidationError
from .packed import BitVec
from .seeding import child_rng

# 99% two-sided normal quantile, for Monte Carlo confidence half-widths.
Z99 = 2.5758293035489004

_MC_CHUNK = 1 << 20


@dataclass(frozen=True, slots=True)
class QuestionTriple:
    """A question (x, y, z) of the n-fold game; must satisfy x XOR y XOR z = 0."""

    x: BitVec
    y: BitVec
    z: BitVec

    def __post_init__(self):
        if not (self.x.n == self.y.n == self.z.n):
            raise ValidationError("question coordinates have mismatched dimensions")
        if self.x.bits ^ self.y.bits ^ self.z.bits != 0:
            raise ValidationError("question not in S^n: x XOR y XOR z != 0")

    @property
    def n(self) -> int:
        return self.x.n


class StrategyTable:
    """Dense truth table of one player's map {0,1}^n -> {0,1}^n.

    Entry j of `table` is the packed answer to packed input j.
    """

    __slots__ = ("n", "table")

    def __init__(self, n: int, table):
        limits.check_vec_n(n)
        arr = np.asarray(table, dtype=np.int64)
        if arr.shape != (1 << n,):
            raise ValidationError(f"table must have 2^{n} entries, got shape {arr.shape}")
        if arr.min(initial=0) < 0 or arr.max(initial=0) >= (1 << n):
            raise ValidationError("table entries out of range for dimension")
        self.n = n
        self.table = arr
        self.table.setflags(write=False)

    @classmethod
    def constant(cls, n: int, bit: int) -> "StrategyTable":
        if bit not in (0, 1):
            raise ValidationError("constant bit must be 0 or 1")
        value = ((1 << n) - 1) if bit else 0
        return cls(n, np.full(1 << n, value, dtype=np.int64))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "StrategyTable":
        return cls(n, rng.integers(0, 1 << n, size=1 << n, dtype=np.int64))

    def apply(self, x) -> BitVec:
        j = int(x)
        return BitVec(self.n, int(self.table[j]))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StrategyTable)
            and self.n == other.n
            and np.array_equal(self.table, other.table)
        )

    def __repr__(self) -> str:
        return f"StrategyTable(n={self.n}, table={self.table.tolist()!r})"


@dataclass(frozen=True, slots=True)
class StrategyTriple:
    """Strategies for Alice (f), Bob (g) and Charlie (h), sharing one dimension."""

    f: StrategyTable
    g: StrategyTable
    h: StrategyTable

    def __post_init__(self):
        if not (self.f.n == self.g.n == self.h.n):
            raise ValidationError("strategy tables have mismatched dimensions")

    @property
    def n(self) -> int:
        return self.f.n


@dataclass(frozen=True, slots=True)
class ValueReport:
    """Success probability of a strategy: exact rational or Monte Carlo estimate."""

    eta: Fraction | float
    ci_halfwidth: float | None = None
    samples: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.is_exact:
            if self.ci_halfwidth is not None or self.samples is not None:
                raise ValidationError("exact reports carry no CI or sample count")
        else:
            if self.ci_halfwidth is None or self.ci_halfwidth <= 0:
                raise ValidationError("MC reports need ci_halfwidth > 0")
            if self.samples is None or self.samples < 1:
                raise ValidationError("MC reports need samples >= 1")

    @property
    def is_exact(self) -> bool:
        return isinstance(self.eta, Fraction)


def enumerate_questions(n: int) -> Iterator[QuestionTriple]:
    """All 4^n questions of the n-fold game, lexicographic in (x, y)."""
    limits.check_enum_n(n)
    size = 1 << n
    for xb in range(size):
        x = BitVec(n, xb)
        for yb in range(size):
            yield QuestionTriple(x, BitVec(n, yb), BitVec(n, xb ^ yb))


def win_predicate(answers: tuple[BitVec, BitVec, BitVec], q: QuestionTriple) -> bool:
    """True iff a XOR b XOR c = x OR y OR z holds in every coordinate."""
    a, b, c = answers
    if not (a.n == b.n == c.n == q.n):
        raise ValidationError("answer/question dimension mismatch")
    return (a.bits ^ b.bits ^ c.bits) == (q.x.bits | q.y.bits | q.z.bits)


def evaluate_value_exact(st: StrategyTriple) -> ValueReport:
    """Exact success probability, as a rational with denominator 4^n."""
    limits.check_enum_n(st.n)
    size = 1 << st.n
    f, g, h = st.f.table, st.g.table, st.h.table
    ys = np.arange(size, dtype=np.int64)
    wins = 0
    for x in range(size):
        lhs = f[x] ^ g ^ h[x ^ ys]
        wins += int(np.count_nonzero(lhs == (x | ys)))
    return ValueReport(Fraction(wins, 1 << (2 * st.n)))


def evaluate_value_mc(st: StrategyTriple, samples: int, seed: int) -> ValueReport:
    """Unbiased Monte Carlo estimate with a 99% normal-approximation half-width."""
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    rng = child_rng(seed, "mc_value")
    size = 1 << st.n
    f, g, h = st.f.table, st.g.table, st.h.table
    wins = 0
    remaining = samples
    while remaining > 0:
        m = min(remaining, _MC_CHUNK)
        x = rng.integers(0, size, size=m, dtype=np.int64)
        y = rng.integers(0, size, size=m, dtype=np.int64)
        wins += int(np.count_nonzero((f[x] ^ g[y] ^ h[x ^ y]) == (x | y)))
        remaining -= m
    p = wins / samples
    half = Z99 * math.sqrt(max(p * (1.0 - p), 1e-300) / samples)
    return ValueReport(p, ci_halfwidth=half, samples=samples, seed=seed)


def best_response(f: StrategyTable, g: StrategyTable) -> tuple[StrategyTable, ValueReport]:
    """Charlie's optimal table against (f, g), and the resulting exact value.

    For each z the 2^n consistent questions are (x, x XOR z); the unique
    fully-winning answer for each is c(x) = f(x) XOR g(x XOR z) XOR (x OR z),
    so the optimal h(z) is the most frequent c (ties to the smallest integer).
    """
    if f.n != g.n:
        raise ValidationError("dimension mismatch between f and g")
    limits.check_enum_n(f.n)
    n = f.n
    size = 1 << n
    xs = np.arange(size, dtype=np.int64)
    h = np.empty(size, dtype=np.int64)
    wins = 0
    for z in range(size):
        c = f.table[xs] ^ g.table[xs ^ z] ^ (xs | z)
        counts = np.bincount(c, minlength=size)
        h[z] = int(np.argmax(counts))
        wins += int(counts[h[z]])
    return StrategyTable(n, h), ValueReport(Fraction(wins, 1 << (2 * n)))


def _all_tables(n: int) -> np.ndarray:
    """Every truth table for dimension n, shape (2^(n*2^n), 2^n)."""
    size = 1 << n
    count = 1 << (n * size)
    ks = np.arange(count, dtype=np.int64)[:, None]
    js = np.arange(size, dtype=np.int64)[None, :]
    return (ks >> (n * js)) & (size - 1)


def exact_game_value(n: int) -> ValueReport:
    """Exact value of the n-fold game by exhaustive (f, g) search with
    best-response collapse for h.  Only n <= 2 is feasible."""
    limits.check_search_n(n)
    size = 1 << n
    tables = _all_tables(n)
    xs = np.arange(size, dtype=np.int64)
    ymat = xs[None, :] ^ xs[:, None]  # ymat[z, x] = x XOR z
    ormat = xs[None, :] | xs[:, None]  # ormat[z, x] = x OR z
    lanes = np.arange(size, dtype=np.int64)
    best = 0
    for g in tables:
        # c[k, z, x] for every candidate f-table k at once
        c = tables[:, None, :] ^ g[ymat][None, :, :] ^ ormat[None, :, :]
        counts = (c[..., None] == lanes).sum(axis=2)
        wins = counts.max(axis=2).sum(axis=1)
        best = max(best, int(wins.max()))
    return ValueReport(Fraction(best, 1 << (2 * n)))


# ---------------------------------------------------------------------------
# Strategy families
# ---------------------------------------------------------------------------


def constant_strategy(n: int, bit: int) -> StrategyTriple:
    t = StrategyTable.constant(n, bit)
    return StrategyTriple(t, t, t)


def product_strategy(base: StrategyTriple, n: int) -> StrategyTriple:
    """Apply a one-round strategy independently in every coordinate."""
    if base.n != 1:
        raise ValidationError("product base must be a 1-dimensional strategy triple")
    limits.check_vec_n(n)
    size = 1 << n
    js = np.arange(size, dtype=np.int64)

    def lift(t: StrategyTable) -> StrategyTable:
        out = np.zeros(size, dtype=np.int64)
        for i in range(n):
            out |= t.table[(js >> i) & 1] << i
        return StrategyTable(n, out)

    return StrategyTriple(lift(base.f), lift(base.g), lift(base.h))


def random_strategy(n: int, seed: int) -> StrategyTriple:
    rng = child_rng(seed, "random_strategy")
    return StrategyTriple(
        StrategyTable.random(n, rng),
        StrategyTable.random(n, rng),
        StrategyTable.random(n, rng),
    )


def make_strategy(family: str, n: int, seed: int | None = None, **params):
    """Build a named strategy family.

    Families "constant0", "constant1", "product-constant0", "product-constant1"
    and "random" return a StrategyTriple.  Family "planted" returns a
    CrossTriple: its defining property (values confined to one coset
    s + {0,2}^n) is impossible for any strategy transform, which always has
    F(x) = x mod 2, so the planted family lives in cross-function space.
    """
    if family == "constant0":
        return constant_strategy(n, 0)
    if family == "constant1":
        return constant_strategy(n, 1)
    if family in ("product-constant0", "product-constant1"):
        bit = 1 if family.endswith("1") else 0
        return product_strategy(constant_strategy(1, bit), n)
    if family == "random":
        if seed is None:
            raise ValidationError("family 'random' needs a seed")
        return random_strategy(n, seed)
    if family in ("planted", "planted_shift"):
        from .crossfn import make_planted

        if seed is None:
            raise ValidationError("family 'planted' needs a seed")
        return make_planted(n, seed, **params).cross
    raise ValidationError(f"unknown strategy family {family!r}")

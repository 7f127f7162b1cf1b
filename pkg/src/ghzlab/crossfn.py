"""Recoding GHZ strategies as cross-functions into Z4^n.

The coordinatewise win condition a XOR b XOR c = x OR y OR z over S is
equivalent to 2a + 2b + 2c = x + y + z (mod 4): when the OR is 1 exactly two
of x, y, z are 1, so their integer sum is 2.  Setting F(x) = 2f(x) - x,
G(y) = 2g(y) - y, H(z) = 2h(z) - z (per coordinate, mod 4) turns the whole
game check into F(x) + G(y) + H(z) = 0 (mod 4).  The triple (F, G, H) then
wins with the same probability as (f, g, h), i.e. it is an approximate
cross-homomorphism from Z2^n to Z4^n.

Every transform satisfies F(x) = x (mod 2) coordinatewise, which pins f
down from F; `strategy_from_cross` inverts the recoding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import limits
from .errors import ValidationError
from .game import (
    QuestionTriple,
    StrategyTable,
    StrategyTriple,
    ValueReport,
    Z99,
    win_predicate,
)
from .packed import compress_bits, lo_mask, qadd, qneg, qsub, spread_bits
from .seeding import child_rng

ROLES = ("alice", "bob", "charlie")


class CrossFn:
    """Dense table of a map Z2^n -> Z4^n; entry j is the packed value at input j."""

    __slots__ = ("n", "table")

    def __init__(self, n: int, table):
        limits.check_vec_n(n)
        arr = np.asarray(table, dtype=np.int64)
        if arr.shape != (1 << n,):
            raise ValidationError(f"table must have 2^{n} entries, got shape {arr.shape}")
        if arr.min(initial=0) < 0 or arr.max(initial=0) >= (1 << (2 * n)):
            raise ValidationError("table entries out of range for dimension")
        self.n = n
        self.table = arr
        self.table.setflags(write=False)

    def apply(self, x) -> int:
        return int(self.table[int(x)])

    def is_parity_anchored(self) -> bool:
        """True iff F(x) = x (mod 2) coordinatewise, i.e. F is some strategy's transform."""
        lo = lo_mask(self.n)
        xs = np.arange(1 << self.n, dtype=np.int64)
        return bool(np.array_equal(self.table & lo, spread_bits(xs)))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CrossFn)
            and self.n == other.n
            and np.array_equal(self.table, other.table)
        )

    def __repr__(self) -> str:
        return f"CrossFn(n={self.n}, table={self.table.tolist()!r})"


@dataclass(frozen=True, slots=True)
class CrossTriple:
    F: CrossFn
    G: CrossFn
    H: CrossFn

    def __post_init__(self):
        if not (self.F.n == self.G.n == self.H.n):
            raise ValidationError("cross functions have mismatched dimensions")

    @property
    def n(self) -> int:
        return self.F.n


def to_cross(t: StrategyTable, role: str = "alice") -> CrossFn:
    """Transform one strategy table: output digit i at input v is 2*t(v)_i - v_i mod 4."""
    if role not in ROLES:
        raise ValidationError(f"role must be one of {ROLES}")
    lo = lo_mask(t.n)
    vs = np.arange(1 << t.n, dtype=np.int64)
    return CrossFn(t.n, qsub(spread_bits(t.table) << 1, spread_bits(vs), lo))


def cross_triple(st: StrategyTriple) -> CrossTriple:
    return CrossTriple(
        to_cross(st.f, "alice"), to_cross(st.g, "bob"), to_cross(st.h, "charlie")
    )


def strategy_from_cross(F: CrossFn) -> StrategyTable:
    """Invert the transform; valid only for parity-anchored tables."""
    if not F.is_parity_anchored():
        raise ValidationError("cross function is not a strategy transform")
    lo = lo_mask(F.n)
    xs = np.arange(1 << F.n, dtype=np.int64)
    doubled = qadd(F.table, spread_bits(xs), lo)  # digits now in {0, 2}
    return StrategyTable(F.n, compress_bits(doubled >> 1))


def cross_success(
    ct: CrossTriple, samples: int | None = None, seed: int | None = None
) -> ValueReport:
    """Probability over (x, y) uniform, z = x XOR y, that F(x)+G(y)+H(z) = 0 mod 4.

    Exact when samples is None (needs n within the enumeration bound),
    otherwise a seeded Monte Carlo estimate.
    """
    n = ct.n
    lo = lo_mask(n)
    F, G, H = ct.F.table, ct.G.table, ct.H.table
    size = 1 << n
    if samples is None:
        limits.check_enum_n(n)
        ys = np.arange(size, dtype=np.int64)
        wins = 0
        for x in range(size):
            total = qadd(F[x], qadd(G, H[x ^ ys], lo), lo)
            wins += int(np.count_nonzero(total == 0))
        return ValueReport(Fraction(wins, 1 << (2 * n)))
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    if seed is None:
        raise ValidationError("Monte Carlo mode needs a seed")
    rng = child_rng(seed, "mc_value")
    x = rng.integers(0, size, size=samples, dtype=np.int64)
    y = rng.integers(0, size, size=samples, dtype=np.int64)
    total = qadd(F[x], qadd(G[y], H[x ^ y], lo), lo)
    wins = int(np.count_nonzero(total == 0))
    p = wins / samples
    half = Z99 * math.sqrt(max(p * (1.0 - p), 1e-300) / samples)
    return ValueReport(p, ci_halfwidth=half, samples=samples, seed=seed)


def equivalence_check(st: StrategyTriple, q: QuestionTriple) -> bool:
    """Confirm, for one question, that the strategy wins iff its transform sums to zero.

    Always true for a correct implementation; exposed so the reduction stays
    independently falsifiable rather than silently trusted.
    """
    if st.n != q.n:
        raise ValidationError("strategy/question dimension mismatch")
    answers = (st.f.apply(q.x), st.g.apply(q.y), st.h.apply(q.z))
    won = win_predicate(answers, q)
    ct = cross_triple(st)
    lo = lo_mask(st.n)
    total = qadd(
        ct.F.apply(q.x), qadd(ct.G.apply(q.y), ct.H.apply(q.z), lo), lo
    )
    return won == (total == 0)


# ---------------------------------------------------------------------------
# Planted cross-functions: F(x) = s + 2*l(x) with l linear over Z2
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class PlantedInstance:
    """A cross-triple with known hidden shift structure.

    F = G has every value in s + {0,2}^n; H compensates so the triple sums to
    zero on all of S^n (success probability 1 before corruption).
    `corrupted` lists the inputs of F that were overwritten with random values.
    """

    cross: CrossTriple
    shift: int
    columns: tuple[int, ...]
    corrupted: tuple[int, ...]
    seed: int

    @property
    def n(self) -> int:
        return self.cross.n


def linear_map_table(columns, n: int) -> np.ndarray:
    """Tabulate l(x) = XOR of columns[i] over set bits i of x."""
    cols = tuple(int(c) for c in columns)
    if len(cols) != n or any(not 0 <= c < (1 << n) for c in cols):
        raise ValidationError("linear map needs n column masks in range")
    xs = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=np.int64)
    for i, c in enumerate(cols):
        out ^= np.where(((xs >> i) & 1) == 1, c, 0)
    return out


def make_planted(
    n: int,
    seed: int,
    shift: int | None = None,
    columns=None,
    corrupt_fraction: float = 0.0,
) -> PlantedInstance:
    """Sample a planted instance; corrupt_fraction of F's inputs get random values."""
    limits.check_vec_n(n)
    if not 0.0 <= corrupt_fraction <= 1.0:
        raise ValidationError("corrupt_fraction must lie in [0, 1]")
    rng = child_rng(seed, "planted")
    lo = lo_mask(n)
    size = 1 << n
    if shift is None:
        shift = int(rng.integers(0, 1 << (2 * n)))
    if not 0 <= shift < (1 << (2 * n)):
        raise ValidationError("shift out of range")
    if columns is None:
        columns = tuple(int(v) for v in rng.integers(0, size, size=n))
    ell = linear_map_table(columns, n)
    structured = qadd(shift, spread_bits(ell) << 1, lo)
    h_const = qneg(qadd(shift, shift, lo), lo)
    h_table = qadd(h_const, spread_bits(ell) << 1, lo)
    f_table = structured.copy()
    corrupted: tuple[int, ...] = ()
    k = int(corrupt_fraction * size)
    if k > 0:
        idx = rng.choice(size, size=k, replace=False)
        f_table[idx] = rng.integers(0, 1 << (2 * n), size=k, dtype=np.int64)
        corrupted = tuple(sorted(int(i) for i in idx))
    ct = CrossTriple(CrossFn(n, f_table), CrossFn(n, structured), CrossFn(n, h_table))
    return PlantedInstance(ct, shift, tuple(int(c) for c in columns), corrupted, seed)

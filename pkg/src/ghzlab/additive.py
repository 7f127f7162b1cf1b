"""Set arithmetic and additive-energy primitives over Z2^n x Z4^n.

Subsets of the product group carry two interchangeable representations:

* sparse -- a sorted array of 3n-bit keys (u << 2n) | w, one per element;
* dense  -- a boolean indicator over all 8^n group elements.

Sumsets in dense mode go through the group's Fourier transform: the
indicator reshaped to (2,)*n + (4,)*n makes np.fft.fftn apply an order-2
transform along every Z2 axis and an order-4 transform along every Z4 axis,
so pointwise multiplication computes the group convolution exactly (counts
are integers, so a 0.5 threshold absorbs float error).  Sparse mode hashes
all pairwise sums.  The two modes are tested against each other.

Additive quadruples of F: Z2^n -> Z4^n are tuples (x, y, u, v) with
x + y = u + v and F(x) + F(y) = F(u) + F(v).  The histogram counter groups
pairs by the XOR difference class s = x XOR y and sums squared multiplicities
of the pair sums F(x) + F(x XOR s); the naive counter enumerates all N^3
XOR-consistent quadruples and serves as its oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple, Optional

import numpy as np

from . import limits
from .errors import DimensionError, InternalCheckError, ValidationError
from .crossfn import CrossFn, CrossTriple, cross_success
from .packed import BitVec, QuatVec, lo_mask, qadd, qneg
from .seeding import child_rng

_SPARSE_PAIR_BUDGET = 1 << 24


@dataclass(frozen=True, slots=True)
class GroupElem:
    """Element of Z2^n x Z4^n: XOR on the u part, mod-4 lanes on the w part."""

    u: BitVec
    w: QuatVec

    def __post_init__(self):
        if self.u.n != self.w.n:
            raise ValidationError("component dimensions differ")

    @property
    def n(self) -> int:
        return self.u.n

    def __add__(self, other: "GroupElem") -> "GroupElem":
        return GroupElem(self.u ^ other.u, self.w + other.w)

    def __neg__(self) -> "GroupElem":
        return GroupElem(self.u, -self.w)

    def __sub__(self, other: "GroupElem") -> "GroupElem":
        return self + (-other)

    def key(self) -> int:
        return (self.u.bits << (2 * self.n)) | self.w.value


class GroupSet:
    """Immutable subset of Z2^n x Z4^n, stored as sorted unique packed keys."""

    __slots__ = ("n", "keys")

    def __init__(self, n: int, keys):
        limits.check_groupset_n(n)
        arr = np.unique(np.asarray(keys, dtype=np.int64))
        if arr.size and (arr[0] < 0 or arr[-1] >= (1 << (3 * n))):
            raise ValidationError("element keys out of range for dimension")
        self.n = n
        self.keys = arr
        self.keys.setflags(write=False)

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "GroupSet":
        ks = [(int(u) << (2 * n)) | int(w) for u, w in pairs]
        return cls(n, np.asarray(ks, dtype=np.int64))

    @classmethod
    def from_elems(cls, elems) -> "GroupSet":
        elems = list(elems)
        if not elems:
            raise ValidationError("cannot infer dimension from an empty element list")
        return cls(elems[0].n, np.asarray([e.key() for e in elems], dtype=np.int64))

    @classmethod
    def from_dense(cls, n: int, indicator: np.ndarray) -> "GroupSet":
        flat = indicator.reshape(-1)
        if flat.shape != (1 << (3 * n),):
            raise ValidationError("dense indicator has wrong size")
        return cls(n, np.nonzero(flat)[0].astype(np.int64))

    def to_dense(self) -> np.ndarray:
        limits.check_dense_n(self.n)
        ind = np.zeros(1 << (3 * self.n), dtype=bool)
        ind[self.keys] = True
        return ind

    def us(self) -> np.ndarray:
        return self.keys >> (2 * self.n)

    def ws(self) -> np.ndarray:
        return self.keys & ((1 << (2 * self.n)) - 1)

    def negated(self) -> "GroupSet":
        lo = lo_mask(self.n)
        return GroupSet(self.n, (self.us() << (2 * self.n)) | qneg(self.ws(), lo))

    def contains_key(self, key: int) -> bool:
        i = int(np.searchsorted(self.keys, key))
        return i < self.keys.size and int(self.keys[i]) == key

    def __contains__(self, elem: GroupElem) -> bool:
        return self.contains_key(elem.key())

    def __len__(self) -> int:
        return int(self.keys.size)

    def __iter__(self) -> Iterator[GroupElem]:
        for k in self.keys:
            yield GroupElem(
                BitVec(self.n, int(k) >> (2 * self.n)),
                QuatVec(self.n, int(k) & ((1 << (2 * self.n)) - 1)),
            )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupSet)
            and self.n == other.n
            and np.array_equal(self.keys, other.keys)
        )

    def __repr__(self) -> str:
        return f"GroupSet(n={self.n}, size={len(self)})"


def _check_same_n(a: GroupSet, b: GroupSet) -> int:
    if a.n != b.n:
        raise ValidationError("operands have different dimensions")
    return a.n


def _sumset_sparse(a: GroupSet, b: GroupSet) -> GroupSet:
    n = a.n
    lo = lo_mask(n)
    shift = 2 * n
    wmask = (1 << shift) - 1
    ua, wa = a.us(), a.ws()
    ub, wb = b.us(), b.ws()
    rows = max(1, _SPARSE_PAIR_BUDGET // max(1, len(b)))
    acc: Optional[np.ndarray] = None
    for start in range(0, len(a), rows):
        au, aw = ua[start : start + rows], wa[start : start + rows]
        u = au[:, None] ^ ub[None, :]
        w = qadd(aw[:, None], wb[None, :], lo)
        chunk = np.unique((u << shift) | w)
        acc = chunk if acc is None else np.union1d(acc, chunk)
    return GroupSet(n, acc if acc is not None else np.empty(0, dtype=np.int64))


def _sumset_dense(a: GroupSet, b: GroupSet) -> GroupSet:
    n = a.n
    limits.check_dense_n(n)
    shape = (2,) * n + (4,) * n
    fa = np.fft.fftn(a.to_dense().astype(np.complex128).reshape(shape))
    fb = np.fft.fftn(b.to_dense().astype(np.complex128).reshape(shape))
    counts = np.fft.ifftn(fa * fb).real
    return GroupSet.from_dense(n, counts > 0.5)


def sumset(a: GroupSet, b: GroupSet, mode: str = "auto") -> GroupSet:
    """Elementwise sums {p + q : p in a, q in b}."""
    n = _check_same_n(a, b)
    if len(a) == 0 or len(b) == 0:
        return GroupSet(n, np.empty(0, dtype=np.int64))
    if mode == "auto":
        dense_ok = n <= limits.DENSE_MAX_N
        mode = "dense" if dense_ok and len(a) * len(b) > (1 << (3 * n)) else "sparse"
    if mode == "dense":
        return _sumset_dense(a, b)
    if mode == "sparse":
        return _sumset_sparse(a, b)
    raise ValidationError(f"unknown sumset mode {mode!r}")


def difference_set(a: GroupSet, b: GroupSet, mode: str = "auto") -> GroupSet:
    """Elementwise differences {p - q : p in a, q in b}."""
    return sumset(a, b.negated(), mode)


def iterated_sumset(a: GroupSet, k: int, mode: str = "auto") -> GroupSet:
    """The k-fold sumset kA, by repeated doubling plus one final multiply."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    acc: Optional[GroupSet] = None
    cur = a
    while k:
        if k & 1:
            acc = cur if acc is None else sumset(acc, cur, mode)
        k >>= 1
        if k:
            cur = sumset(cur, cur, mode)
    assert acc is not None
    return acc


class DoublingReport(NamedTuple):
    size: int
    diff_size: int
    ratio: Fraction


def doubling_report(a: GroupSet, mode: str = "auto") -> DoublingReport:
    """|A - A| and the doubling ratio |A - A| / |A|."""
    if len(a) == 0:
        raise ValidationError("doubling ratio undefined for the empty set")
    d = difference_set(a, a, mode)
    return DoublingReport(len(a), len(d), Fraction(len(d), len(a)))


# ---------------------------------------------------------------------------
# Additive quadruples
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class QuadrupleReport:
    count: int
    n: int
    method: str
    bound: Fraction | None = None

    def __post_init__(self):
        if not 0 <= self.count <= self.N**3:
            raise ValidationError("quadruple count outside [0, N^3]")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def density(self) -> Fraction:
        return Fraction(self.count, self.N**3)


def _pair_sum_counts(vals: np.ndarray, n: int):
    if n <= limits.DENSE_MAX_N:
        counts = np.bincount(vals, minlength=1 << (2 * n))
        return counts[counts > 0]
    _, counts = np.unique(vals, return_counts=True)
    return counts


def count_quadruples(F: CrossFn, method: str = "histogram") -> QuadrupleReport:
    """Exact number of quadruples (x, y, u, v): x XOR y = u XOR v, F(x)+F(y) = F(u)+F(v)."""
    n = F.n
    lo = lo_mask(n)
    size = 1 << n
    xs = np.arange(size, dtype=np.int64)
    if method == "histogram":
        if n > limits.QUAD_HIST_MAX_N:
            raise DimensionError(f"histogram counting is O(4^n); n={n} exceeds bound")
        total = 0
        for s in range(size):
            counts = _pair_sum_counts(qadd(F.table, F.table[xs ^ s], lo), n)
            total += int(np.dot(counts, counts))
        return QuadrupleReport(total, n, method)
    if method == "naive":
        if n > limits.QUAD_NAIVE_MAX_N:
            raise DimensionError(f"naive counting is O(8^n); n={n} exceeds bound")
        total = 0
        for x in range(size):
            fx = F.table[x]
            for y in range(size):
                target = qadd(fx, F.table[y], lo)
                sums_u = qadd(F.table, F.table[xs ^ (x ^ y)], lo)
                total += int(np.count_nonzero(sums_u == target))
        return QuadrupleReport(total, n, method)
    raise ValidationError(f"unknown counting method {method!r}")


class QuadrupleBoundCheck(NamedTuple):
    eta: Fraction
    count: int
    bound: Fraction
    holds: bool


def quadruple_bound_check(ct: CrossTriple) -> QuadrupleBoundCheck:
    """Compare F's quadruple count against eta^4 * N^3 in exact arithmetic.

    A triple succeeding with probability eta always has at least eta^4 * N^3
    quadruples; the check reports rather than assumes this.
    """
    eta = cross_success(ct).eta
    count = count_quadruples(ct.F, "histogram").count
    bound = eta**4 * Fraction(1 << (3 * ct.n))
    return QuadrupleBoundCheck(eta, count, bound, Fraction(count) >= bound)


# ---------------------------------------------------------------------------
# Freiman homomorphism checking
# ---------------------------------------------------------------------------


class PartialMap:
    """A map from a subset of Z2^n into Z4^n, tabulated on a sorted domain."""

    __slots__ = ("n", "domain", "values")

    def __init__(self, n: int, domain, values):
        limits.check_vec_n(n)
        dom = np.asarray(domain, dtype=np.int64)
        val = np.asarray(values, dtype=np.int64)
        if dom.size == 0:
            raise ValidationError("domain must be nonempty")
        if dom.shape != val.shape:
            raise ValidationError("domain and values have different lengths")
        order = np.argsort(dom)
        dom, val = dom[order], val[order]
        if np.any(dom[1:] == dom[:-1]):
            raise ValidationError("duplicate domain points")
        if dom[0] < 0 or dom[-1] >= (1 << n) or val.min() < 0 or val.max() >= (1 << (2 * n)):
            raise ValidationError("domain or values out of range")
        self.n = n
        self.domain = dom
        self.values = val
        self.domain.setflags(write=False)
        self.values.setflags(write=False)

    @classmethod
    def from_crossfn(cls, F: CrossFn, subset=None) -> "PartialMap":
        if subset is None:
            dom = np.arange(1 << F.n, dtype=np.int64)
        else:
            dom = np.asarray(sorted(int(x) for x in subset), dtype=np.int64)
        return cls(F.n, dom, F.table[dom])

    def __len__(self) -> int:
        return int(self.domain.size)

    def lookup(self, xs: np.ndarray) -> np.ndarray:
        """Positions of xs in the domain, or -1 where absent."""
        pos = np.searchsorted(self.domain, xs)
        pos[pos >= self.domain.size] = 0
        hit = self.domain[pos] == xs
        return np.where(hit, pos, -1)


class FreimanWitness(NamedTuple):
    a: tuple[int, ...]
    b: tuple[int, ...]


class FreimanReport(NamedTuple):
    ok: bool
    order: int
    mode: str
    witness: FreimanWitness | None
    trials: int  # sampled tuples (randomized mode) or enumerated tuples (exact)
    effective: int  # tuples whose solved endpoint landed in the domain
    violations: int


def _decode_tuple(index: int, base: int, length: int) -> tuple[int, ...]:
    digits = []
    for _ in range(length):
        digits.append(index % base)
        index //= base
    return tuple(digits)


def _freiman_exact(phi: PartialMap, k: int) -> FreimanReport:
    m = len(phi)
    lo = lo_mask(phi.n)
    total = m**k
    zs = np.zeros(1, dtype=np.int64)
    ps = np.zeros(1, dtype=np.int64)
    for _ in range(k):
        zs = (zs[:, None] ^ phi.domain[None, :]).reshape(-1)
        ps = qadd(ps[:, None], phi.values[None, :], lo).reshape(-1)
    order = np.lexsort((ps, zs))
    zs_s, ps_s = zs[order], ps[order]
    same_z = zs_s[1:] == zs_s[:-1]
    diff_p = ps_s[1:] != ps_s[:-1]
    bad = np.nonzero(same_z & diff_p)[0]
    if bad.size == 0:
        return FreimanReport(True, k, "exact", None, total, total, 0)
    i = int(bad[0])
    wa = _decode_tuple(int(order[i]), m, k)
    wb = _decode_tuple(int(order[i + 1]), m, k)
    witness = FreimanWitness(
        tuple(int(phi.domain[d]) for d in wa), tuple(int(phi.domain[d]) for d in wb)
    )
    return FreimanReport(False, k, "exact", witness, total, total, int(bad.size))


def _freiman_randomized(phi: PartialMap, k: int, trials: int, seed: int) -> FreimanReport:
    rng = child_rng(seed, "freiman")
    lo = lo_mask(phi.n)
    m = len(phi)
    idx = rng.integers(0, m, size=(trials, 2 * k - 1))
    xs = phi.domain[idx]
    vals = phi.values[idx]
    # solve for the last b so both sides share the same Z2^n sum
    need = np.bitwise_xor.reduce(xs, axis=1)
    pos = phi.lookup(need)
    ok_rows = pos >= 0
    effective = int(np.count_nonzero(ok_rows))
    if effective == 0:
        return FreimanReport(True, k, "randomized", None, trials, 0, 0)
    rows = np.nonzero(ok_rows)[0]
    lhs = np.zeros(rows.size, dtype=np.int64)
    for j in range(k):
        lhs = qadd(lhs, vals[rows, j], lo)
    rhs = phi.values[pos[rows]]
    for j in range(k, 2 * k - 1):
        rhs = qadd(rhs, vals[rows, j], lo)
    bad = np.nonzero(lhs != rhs)[0]
    if bad.size == 0:
        return FreimanReport(True, k, "randomized", None, trials, effective, 0)
    r = rows[int(bad[0])]
    wa = tuple(int(v) for v in xs[r, :k])
    wb = tuple(int(v) for v in xs[r, k:]) + (int(need[r]),)
    return FreimanReport(
        False, k, "randomized", FreimanWitness(wa, wb), trials, effective, int(bad.size)
    )


def freiman_check(
    phi: PartialMap,
    order: int,
    mode: str = "auto",
    trials: int = 100_000,
    seed: int = 0,
    exact_budget: int = 1 << 24,
) -> FreimanReport:
    """Test whether phi preserves equality of `order`-fold sums.

    Exact mode enumerates all |domain|^order tuples (refused above
    exact_budget); randomized mode samples tuple pairs with matching Z2^n
    sums and is one-sided: any violation it finds is real.
    """
    if order < 1:
        raise ValidationError("order must be >= 1")
    if mode == "auto":
        mode = "exact" if len(phi) ** order <= exact_budget else "randomized"
    if mode == "exact":
        if len(phi) ** order > exact_budget:
            raise DimensionError(
                f"exact check needs {len(phi)}^{order} tuples, over budget {exact_budget}"
            )
        return _freiman_exact(phi, order)
    if mode == "randomized":
        if trials < 1:
            raise ValidationError("trials must be >= 1")
        return _freiman_randomized(phi, order, trials, seed)
    raise ValidationError(f"unknown mode {mode!r}")


def freiman_witness_violates(phi: PartialMap, order: int, witness: FreimanWitness) -> bool:
    """Independently re-verify a witness: equal Z2^n sums, unequal phi sums."""
    if len(witness.a) != order or len(witness.b) != order:
        return False
    lo = lo_mask(phi.n)
    pos_a = phi.lookup(np.asarray(witness.a, dtype=np.int64))
    pos_b = phi.lookup(np.asarray(witness.b, dtype=np.int64))
    if np.any(pos_a < 0) or np.any(pos_b < 0):
        return False
    za = zb = 0
    pa = pb = 0
    for p in pos_a:
        za ^= int(phi.domain[p])
        pa = qadd(pa, int(phi.values[p]), lo)
    for p in pos_b:
        zb ^= int(phi.domain[p])
        pb = qadd(pb, int(phi.values[p]), lo)
    return za == zb and pa != pb

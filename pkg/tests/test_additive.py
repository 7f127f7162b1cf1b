"""Sumsets, quadruple counting, and Freiman checks against brute-force oracles."""

from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from ghzlab.additive import (
    GroupElem,
    GroupSet,
    PartialMap,
    count_quadruples,
    difference_set,
    doubling_report,
    freiman_check,
    freiman_witness_violates,
    iterated_sumset,
    quadruple_bound_check,
    sumset,
)
from ghzlab.crossfn import CrossFn, CrossTriple, cross_triple, make_planted, to_cross
from ghzlab.errors import DimensionError, ValidationError
from ghzlab.game import StrategyTable, constant_strategy, random_strategy
from ghzlab.packed import BitVec, QuatVec, lo_mask, qadd, quat_from_digits
from ghzlab.extraction import sample_W


def quadruples_by_enumeration(F: CrossFn) -> int:
    """Four nested loops straight from the definition."""
    n, lo = F.n, lo_mask(F.n)
    count = 0
    for x, y, u, v in product(range(1 << n), repeat=4):
        if x ^ y == u ^ v and qadd(int(F.table[x]), int(F.table[y]), lo) == qadd(
            int(F.table[u]), int(F.table[v]), lo
        ):
            count += 1
    return count


def sumset_by_enumeration(a: GroupSet, b: GroupSet) -> GroupSet:
    return GroupSet.from_elems([p + q for p in a for q in b])


# -- quadruple counting -------------------------------------------------------


def test_quadruples_n1_identity_like():
    F = CrossFn(1, [0, 1])
    assert quadruples_by_enumeration(F) == 6
    assert count_quadruples(F, "histogram").count == 6
    assert count_quadruples(F, "naive").count == 6


def test_quadruples_n1_transform_of_constant_one():
    F = to_cross(StrategyTable.constant(1, 1))
    assert quadruples_by_enumeration(F) == 6
    assert count_quadruples(F, "histogram").count == 6


@pytest.mark.parametrize("n", [1, 2, 3])
def test_quadruples_constant_function_is_N_cubed(n):
    F = CrossFn(n, [quat_from_digits([3] * n)] * (1 << n))
    N = 1 << n
    assert count_quadruples(F, "histogram").count == N**3
    assert count_quadruples(F, "naive").count == N**3


@pytest.mark.parametrize("n", [1, 2])
def test_quadruple_counters_match_enumeration_oracle(n):
    rng = np.random.default_rng(n)
    for _ in range(10):
        F = CrossFn(n, rng.integers(0, 1 << (2 * n), size=1 << n))
        expected = quadruples_by_enumeration(F)
        assert count_quadruples(F, "histogram").count == expected
        assert count_quadruples(F, "naive").count == expected


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_histogram_equals_naive_random(n):
    rng = np.random.default_rng(10 + n)
    for _ in range(10):
        F = CrossFn(n, rng.integers(0, 1 << (2 * n), size=1 << n))
        a = count_quadruples(F, "histogram").count
        assert a == count_quadruples(F, "naive").count
        assert a <= (1 << n) ** 3


def test_quadruple_method_bounds():
    with pytest.raises(DimensionError):
        count_quadruples(CrossFn(9, np.zeros(512, dtype=np.int64)), "naive")
    with pytest.raises(ValidationError):
        count_quadruples(CrossFn(1, [0, 1]), "smart")


# -- the eta^4 N^3 lower bound -------------------------------------------------


def test_bound_check_constant_one_strategy():
    check = quadruple_bound_check(cross_triple(constant_strategy(1, 1)))
    assert check.eta == Fraction(3, 4)
    assert check.count == 6
    assert check.bound == Fraction(81, 32)
    assert check.holds


def test_bound_check_zero_success_cross_triple():
    # all-ones constant tables never sum to 0, so the bound is vacuous
    F = CrossFn(1, [1, 1])
    check = quadruple_bound_check(CrossTriple(F, F, F))
    assert check.eta == 0
    assert check.bound == 0
    assert check.holds


@pytest.mark.parametrize("n", [2, 3, 4])
def test_bound_holds_on_random_strategies(n):
    for seed in range(25):
        check = quadruple_bound_check(cross_triple(random_strategy(n, seed)))
        assert check.holds


# -- sumsets -------------------------------------------------------------------


def test_sumset_identity_singleton():
    A = GroupSet.from_pairs(3, [(0, 0)])
    assert sumset(A, A) == A
    assert iterated_sumset(A, 5) == A


def test_sumset_hand_case():
    A = GroupSet.from_pairs(1, [(0, 0), (1, 1)])
    S = sumset(A, A)
    assert S == GroupSet.from_pairs(1, [(0, 0), (1, 1), (0, 2)])
    assert S == sumset_by_enumeration(A, A)


def test_group_elem_arithmetic():
    e = GroupElem(BitVec(2, 0b10), QuatVec.from_digits([3, 1]))
    z = e - e
    assert z.u.bits == 0 and z.w.value == 0
    s = e + e
    assert s.u.bits == 0 and s.w.digits() == (2, 2)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_dense_sparse_agree_random(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(10):
        A = GroupSet(n, rng.integers(0, 1 << (3 * n), size=int(rng.integers(1, 50))))
        B = GroupSet(n, rng.integers(0, 1 << (3 * n), size=int(rng.integers(1, 50))))
        assert sumset(A, B, "dense") == sumset(A, B, "sparse")
        assert difference_set(A, B, "dense") == difference_set(A, B, "sparse")


def test_sparse_matches_enumeration_oracle():
    rng = np.random.default_rng(4)
    for n in (1, 2, 3):
        A = GroupSet(n, rng.integers(0, 1 << (3 * n), size=6))
        B = GroupSet(n, rng.integers(0, 1 << (3 * n), size=6))
        assert sumset(A, B, "sparse") == sumset_by_enumeration(A, B)


def test_iterated_sumset_non_power_path():
    rng = np.random.default_rng(8)
    A = GroupSet(3, rng.integers(0, 1 << 9, size=5))
    assert iterated_sumset(A, 3) == sumset(sumset(A, A), A)
    assert iterated_sumset(A, 5) == sumset(iterated_sumset(A, 4), A)


def test_dense_mode_refused_above_bound():
    A = GroupSet.from_pairs(9, [(0, 0)])
    with pytest.raises(DimensionError):
        sumset(A, A, "dense")


@pytest.mark.parametrize("seed", range(4))
def test_subgroup_fixed_point(seed):
    W = sample_W(4, 2, seed).members()
    for k in (1, 2, 3, 4):
        for r in (1, 2, 3, 4):
            assert difference_set(iterated_sumset(W, k), iterated_sumset(W, r)) == W


# -- doubling ------------------------------------------------------------------


def test_doubling_of_subgroup_coset():
    W = sample_W(3, 1, 0).members()
    shift = GroupSet.from_pairs(3, [(0b101, 0b110011 & ((1 << 6) - 1))])
    coset = sumset(W, shift)
    rep = doubling_report(coset)
    assert rep.ratio <= 1
    assert difference_set(coset, coset) == W


def test_doubling_singleton():
    rep = doubling_report(GroupSet.from_pairs(2, [(1, 3)]))
    assert rep.diff_size == 1 and rep.ratio == 1


def test_doubling_empty_rejected():
    with pytest.raises(ValidationError):
        doubling_report(GroupSet(2, []))


# -- Freiman checks --------------------------------------------------------------


def test_freiman_constant_map_passes_any_order():
    phi = PartialMap(3, np.arange(8), np.full(8, 0b10_10_10))
    for k in (2, 4, 8):
        assert freiman_check(phi, k, mode="exact" if 8**k <= 1 << 24 else "randomized").ok


def test_freiman_planted_full_domain_randomized():
    pl = make_planted(6, seed=5)
    phi = PartialMap.from_crossfn(pl.cross.G)
    rep = freiman_check(phi, 8, mode="randomized", trials=100_000, seed=1)
    assert rep.ok and rep.violations == 0
    assert rep.effective > 0


def test_freiman_identity_embedding_fails_order2():
    from ghzlab.packed import spread_bits

    xs = np.arange(4)
    phi = PartialMap(2, xs, spread_bits(xs))
    rep = freiman_check(phi, 2, mode="exact")
    assert not rep.ok
    assert rep.witness is not None
    assert freiman_witness_violates(phi, 2, rep.witness)


def test_freiman_randomized_finds_real_witnesses():
    rng = np.random.default_rng(3)
    found = 0
    for seed in range(10):
        vals = rng.integers(0, 1 << 8, size=16)
        phi = PartialMap(4, np.arange(16), vals)
        rep = freiman_check(phi, 4, mode="randomized", trials=20_000, seed=seed)
        if not rep.ok:
            found += 1
            assert freiman_witness_violates(phi, 4, rep.witness)
    assert found > 0  # random tables are wildly inconsistent


def test_freiman_order_monotone():
    """An exact pass at order k implies a pass at every smaller order."""
    pl = make_planted(3, seed=6)
    phi = PartialMap.from_crossfn(pl.cross.G, subset=range(6))
    results = {k: freiman_check(phi, k, mode="exact").ok for k in (2, 3, 4)}
    assert results[4]
    assert results[3] and results[2]


def test_freiman_exact_agrees_with_randomized_on_violations():
    from ghzlab.packed import spread_bits

    xs = np.arange(8)
    phi = PartialMap(3, xs, spread_bits(xs))
    assert not freiman_check(phi, 2, mode="exact").ok
    rep = freiman_check(phi, 2, mode="randomized", trials=50_000, seed=0)
    assert not rep.ok


def test_freiman_parameter_validation():
    phi = PartialMap(2, [0, 1], [0, 1])
    with pytest.raises(ValidationError):
        freiman_check(phi, 0)
    with pytest.raises(ValidationError):
        PartialMap(2, [], [])
    with pytest.raises(DimensionError):
        freiman_check(PartialMap.from_crossfn(CrossFn(4, np.zeros(16, dtype=np.int64))), 8, mode="exact")

"""Desk-scale resource bounds.

Every bound is checked *before* allocation so refusals are cheap and
predictable.  The bounds are deliberate design constants, not tunables.
"""

from .errors import DimensionError

# Packed-vector width: coordinates of Z2^n / Z4^n vectors.
VEC_MAX_N = 24

# Exact question enumeration: 4^n pairs (x, y), z = x XOR y.
ENUM_MAX_N = 13

# Exhaustive (f, g) search with best-response collapse: 2^(n*2^n) tables/player.
SEARCH_MAX_N = 2

# Quadruple counting: histogram is O(N^2), the naive oracle O(N^3), N = 2^n.
QUAD_HIST_MAX_N = 16
QUAD_NAIVE_MAX_N = 8

# Dense product-group sets: bitset over 8^n elements, 8^n <= 2^24.
DENSE_MAX_N = 8
DENSE_MEMORY_BUDGET = 3 << 30  # bytes allowed for the FFT work arrays

# Sparse product-group sets pack (u, w) into one 3n-bit int64 key.
GROUPSET_MAX_N = 21


def check_vec_n(n: int) -> None:
    if not 1 <= n <= VEC_MAX_N:
        raise DimensionError(f"n={n} outside supported range 1..{VEC_MAX_N}")


def check_enum_n(n: int) -> None:
    check_vec_n(n)
    if n > ENUM_MAX_N:
        raise DimensionError(
            f"exact enumeration needs 4^n questions; n={n} exceeds bound {ENUM_MAX_N}"
        )


def check_search_n(n: int) -> None:
    check_vec_n(n)
    if n > SEARCH_MAX_N:
        raise DimensionError(
            f"full strategy search is 2^(n*2^n) per player; n={n} exceeds bound {SEARCH_MAX_N}"
        )


def check_groupset_n(n: int) -> None:
    if not 1 <= n <= GROUPSET_MAX_N:
        raise DimensionError(
            f"product-group sets pack elements into 3n-bit keys; n={n} exceeds {GROUPSET_MAX_N}"
        )


def check_dense_n(n: int) -> None:
    check_groupset_n(n)
    if n > DENSE_MAX_N:
        raise DimensionError(
            f"dense mode allocates 8^n cells; n={n} exceeds bound {DENSE_MAX_N}"
        )
    # three complex128 work arrays of 8^n cells
    estimate = 3 * 16 * (8**n)
    if estimate > DENSE_MEMORY_BUDGET:
        raise DimensionError(
            f"dense mode would need ~{estimate} bytes, over budget {DENSE_MEMORY_BUDGET}"
        )

"""Packed vectors over Z2^n and Z4^n.

A Z2^n vector is an int with bit i = coordinate i.  A Z4^n vector is an int
with bits [2i, 2i+1] = coordinate i (a 2-bit lane per coordinate).  All lane
arithmetic is branch-free so the same expressions run on Python ints and on
int64 numpy arrays; n <= 24 keeps every packed value under 2^48.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .limits import check_vec_n

# Even/odd bit masks wide enough for 24 two-bit lanes.
_EVEN = 0x5555555555555555
_ODD = 0xAAAAAAAAAAAAAAAA


def lo_mask(n: int) -> int:
    """Mask of the low bit of each of the n lanes: 0b...0101."""
    return ((1 << (2 * n)) - 1) // 3


def quat_mask(n: int) -> int:
    """Mask of all 2n payload bits."""
    return (1 << (2 * n)) - 1


def qadd(a, b, lo):
    """Lanewise addition mod 4; `lo` must be lo_mask(n) for the shared width."""
    return (a ^ b) ^ (((a & b) & lo) << 1)


def qneg(a, lo):
    """Lanewise negation mod 4."""
    return a ^ ((a & lo) << 1)


def qsub(a, b, lo):
    return qadd(a, qneg(b, lo), lo)


def spread_bits(x):
    """Insert a zero bit after every input bit: Z2^n value -> Z4^n value with 0/1 digits."""
    x = (x | (x << 16)) & 0x0000FFFF0000FFFF
    x = (x | (x << 8)) & 0x00FF00FF00FF00FF
    x = (x | (x << 4)) & 0x0F0F0F0F0F0F0F0F
    x = (x | (x << 2)) & 0x3333333333333333
    x = (x | (x << 1)) & _EVEN
    return x


def compress_bits(x):
    """Inverse of spread_bits: keep the even-position bits, packed together."""
    x = x & _EVEN
    x = (x | (x >> 1)) & 0x3333333333333333
    x = (x | (x >> 2)) & 0x0F0F0F0F0F0F0F0F
    x = (x | (x >> 4)) & 0x00FF00FF00FF00FF
    x = (x | (x >> 8)) & 0x0000FFFF0000FFFF
    x = (x | (x >> 16)) & 0x00000000FFFFFFFF
    return x


def quat_digits(w: int, n: int) -> tuple[int, ...]:
    """Coordinates of a packed Z4^n value, index 0 first."""
    return tuple((w >> (2 * i)) & 3 for i in range(n))


def quat_from_digits(digits) -> int:
    w = 0
    for i, d in enumerate(digits):
        if not 0 <= d <= 3:
            raise ValidationError(f"digit {d!r} outside 0..3")
        w |= d << (2 * i)
    return w


def bits_of(v: int, n: int) -> tuple[int, ...]:
    return tuple((v >> i) & 1 for i in range(n))


@dataclass(frozen=True, slots=True)
class BitVec:
    """Element of Z2^n, bit-packed; coordinate i is bit i of `bits`."""

    n: int
    bits: int

    def __post_init__(self):
        check_vec_n(self.n)
        if not 0 <= self.bits < (1 << self.n):
            raise ValidationError(f"bits={self.bits} out of range for n={self.n}")

    @classmethod
    def from_coords(cls, coords) -> "BitVec":
        coords = tuple(coords)
        if any(c not in (0, 1) for c in coords):
            raise ValidationError("coordinates must be 0 or 1")
        return cls(len(coords), sum(c << i for i, c in enumerate(coords)))

    def coord(self, i: int) -> int:
        return (self.bits >> i) & 1

    def coords(self) -> tuple[int, ...]:
        return bits_of(self.bits, self.n)

    def _check_dim(self, other: "BitVec"):
        if self.n != other.n:
            raise ValidationError(f"dimension mismatch: {self.n} != {other.n}")

    def __xor__(self, other: "BitVec") -> "BitVec":
        self._check_dim(other)
        return BitVec(self.n, self.bits ^ other.bits)

    def __or__(self, other: "BitVec") -> "BitVec":
        self._check_dim(other)
        return BitVec(self.n, self.bits | other.bits)

    def __int__(self) -> int:
        return self.bits


@dataclass(frozen=True, slots=True)
class QuatVec:
    """Element of Z4^n, packed 2 bits per coordinate; coordinate i is lanes [2i, 2i+1]."""

    n: int
    value: int

    def __post_init__(self):
        check_vec_n(self.n)
        if not 0 <= self.value < (1 << (2 * self.n)):
            raise ValidationError(f"value={self.value} out of range for n={self.n}")

    @classmethod
    def from_digits(cls, digits) -> "QuatVec":
        digits = tuple(digits)
        return cls(len(digits), quat_from_digits(digits))

    def digit(self, i: int) -> int:
        return (self.value >> (2 * i)) & 3

    def digits(self) -> tuple[int, ...]:
        return quat_digits(self.value, self.n)

    def _check_dim(self, other: "QuatVec"):
        if self.n != other.n:
            raise ValidationError(f"dimension mismatch: {self.n} != {other.n}")

    def __add__(self, other: "QuatVec") -> "QuatVec":
        self._check_dim(other)
        return QuatVec(self.n, qadd(self.value, other.value, lo_mask(self.n)))

    def __neg__(self) -> "QuatVec":
        return QuatVec(self.n, qneg(self.value, lo_mask(self.n)))

    def __sub__(self, other: "QuatVec") -> "QuatVec":
        return self + (-other)

    def parity(self) -> BitVec:
        """The mod-2 reduction of every coordinate, as a Z2^n vector."""
        return BitVec(self.n, compress_bits(self.value & lo_mask(self.n)))

    def is_even(self) -> bool:
        """True when every coordinate lies in {0, 2}."""
        return (self.value & lo_mask(self.n)) == 0

    def __int__(self) -> int:
        return self.value

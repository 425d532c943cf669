"""Privacy amplification by the multiplicative two-universal family over GF(2^n).

``f_r(x)`` is the ``ell`` least significant bits of the field product
``r * x``. Bit 0 of every value is the constant coefficient of the
polynomial; "least significant bits" means the low-order slice.

Byte format (file hashing): the input bytes are read as one big-endian
integer, so the last byte holds bits 0..7 and bit 0 is the LSB of the last
byte. Zero padding happens implicitly at the high end, up to the field
degree. Digests are lowercase hex of the ``ell``-bit value, zero-padded to
``ceil(ell / 4)`` digits; ``ell = 0`` gives the empty string.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import kernels
from .gf2 import is_irreducible

__all__ = [
    "UnsupportedDegreeError",
    "BinaryField",
    "FieldElement",
    "BitString",
    "MODULUS_TABLE",
    "SUPPORTED_DEGREES",
    "select_modulus",
    "gf2_mul",
    "hash_two_universal",
    "collision_probability_exhaustive",
    "apply_seeded_permutation",
    "permutation_indices",
    "hash_bytes",
]


class UnsupportedDegreeError(ValueError):
    pass


# Exponents of the non-leading terms (the constant term is always present).
# n <= 64: the irreducible trinomial x^n + x^k + 1 with the smallest k, or,
# when none exists, the pentanomial x^n + x^a + x^b + x^c + 1 with the
# lexicographically smallest (a, b, c), a > b > c. The larger degrees use
# the usual low-weight choices (128 is the GCM polynomial).
MODULUS_TABLE: dict[int, tuple[int, ...]] = {
    1: (), 2: (1,), 3: (1,), 4: (1,), 5: (2,), 6: (1,), 7: (1,),
    8: (4, 3, 1), 9: (1,), 10: (3,), 11: (2,), 12: (3,), 13: (4, 3, 1),
    14: (5,), 15: (1,), 16: (5, 3, 1), 17: (3,), 18: (3,), 19: (5, 2, 1),
    20: (3,), 21: (2,), 22: (1,), 23: (5,), 24: (4, 3, 1), 25: (3,),
    26: (4, 3, 1), 27: (5, 2, 1), 28: (1,), 29: (2,), 30: (1,), 31: (3,),
    32: (7, 3, 2), 33: (10,), 34: (7,), 35: (2,), 36: (9,), 37: (6, 4, 1),
    38: (6, 5, 1), 39: (4,), 40: (5, 4, 3), 41: (3,), 42: (7,),
    43: (6, 4, 3), 44: (5,), 45: (4, 3, 1), 46: (1,), 47: (5,),
    48: (5, 3, 2), 49: (9,), 50: (4, 3, 2), 51: (6, 3, 1), 52: (3,),
    53: (6, 2, 1), 54: (9,), 55: (7,), 56: (7, 4, 2), 57: (4,), 58: (19,),
    59: (7, 4, 2), 60: (1,), 61: (5, 2, 1), 62: (29,), 63: (1,),
    64: (4, 3, 1),
    127: (1,),
    128: (7, 2, 1),
    256: (10, 5, 2),
    521: (32,),
    1024: (19, 6, 1),
}
SUPPORTED_DEGREES = tuple(sorted(MODULUS_TABLE))

_field_cache: dict[int, "BinaryField"] = {}


@dataclass(frozen=True)
class BinaryField:
    """GF(2^degree) = GF(2)[x] / (modulus). Irreducibility is checked on creation."""

    degree: int
    modulus: int

    def __post_init__(self):
        if self.degree < 1:
            raise UnsupportedDegreeError(f"degree {self.degree} < 1")
        if self.modulus.bit_length() != self.degree + 1:
            raise ValueError(f"modulus {self.modulus:#x} does not have degree {self.degree}")
        if not self.modulus & 1:
            raise ValueError(f"modulus {self.modulus:#x} lacks the constant term")
        if not is_irreducible(self.modulus):
            raise ValueError(f"modulus {self.modulus:#x} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.degree

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    def mul(self, a: int, b: int) -> int:
        return kernels.gf2_mulmod(a, b, self.modulus, self.degree)

    def pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inverse(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(a, self.order - 2)

    def terms(self) -> str:
        exps = [i for i in range(self.degree, -1, -1) if self.modulus >> i & 1]
        return " + ".join("1" if e == 0 else "x" if e == 1 else f"x^{e}" for e in exps)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: BinaryField

    def __post_init__(self):
        if not (0 <= self.value < self.field.order):
            raise ValueError(f"{self.value:#x} does not fit in {self.field.degree} bits")

    def _check(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field != self.field:
            raise ValueError("elements belong to different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.value ^ other.value, self.field)

    __sub__ = __add__

    def __mul__(self, other):
        return gf2_mul(self, other)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field.inverse(self.value), self.field)

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class BitString:
    """``length`` bits stored in ``value``; bit 0 is the least significant."""

    value: int
    length: int

    def __post_init__(self):
        if self.length < 0 or self.value < 0 or self.value >> self.length:
            raise ValueError(f"{self.value:#x} does not fit in {self.length} bits")

    def bits(self) -> list[int]:
        return [(self.value >> i) & 1 for i in range(self.length)]

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitString":
        value = 0
        for i, b in enumerate(bits):
            value |= (int(b) & 1) << i
        return cls(value, len(bits))

    def hex(self) -> str:
        if self.length == 0:
            return ""
        return f"{self.value:0{(self.length + 3) // 4}x}"


def select_modulus(n: int) -> BinaryField:
    """Fixed irreducible modulus of degree n from the shipped table."""
    if n not in MODULUS_TABLE:
        raise UnsupportedDegreeError(
            f"degree {n} not supported (1..64, 127, 128, 256, 521, 1024)")
    field = _field_cache.get(n)
    if field is None:
        modulus = (1 << n) | 1
        for e in MODULUS_TABLE[n]:
            modulus |= 1 << e
        field = _field_cache[n] = BinaryField(n, modulus)
    return field


def gf2_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    if a.field != b.field:
        raise ValueError("elements belong to different fields")
    return FieldElement(a.field.mul(a.value, b.value), a.field)


def _as_int(v, n: int) -> int:
    if isinstance(v, (FieldElement, BitString)):
        v = v.value
    v = int(v)
    if not (0 <= v < 1 << n):
        raise ValueError(f"{v:#x} does not fit in {n} bits")
    return v


def hash_two_universal(x, r, ell: int, field: BinaryField) -> BitString:
    """``ell`` low bits of ``r * x`` in ``field``."""
    n = field.degree
    if not (0 <= ell <= n):
        raise ValueError(f"ell={ell} must lie in [0, {n}]")
    product = field.mul(_as_int(r, n), _as_int(x, n))
    return BitString(product & ((1 << ell) - 1), ell)


def collision_probability_exhaustive(field: BinaryField, ell: int, x, x2) -> Fraction:
    """Exact Pr_r[f_r(x) = f_r(x2)] by enumerating every multiplier r."""
    n = field.degree
    if n > 16:
        raise ValueError(f"exhaustive enumeration refused for degree {n} > 16")
    if not (0 <= ell <= n):
        raise ValueError(f"ell={ell} must lie in [0, {n}]")
    xv, x2v = _as_int(x, n), _as_int(x2, n)
    rs = range(1 << n)
    mask = (1 << ell) - 1
    ya = kernels.gf2_mulmod_many(rs, [xv] * len(rs), field.modulus, n)
    yb = kernels.gf2_mulmod_many(rs, [x2v] * len(rs), field.modulus, n)
    hits = sum(1 for a, b in zip(ya, yb) if (a ^ b) & mask == 0)
    return Fraction(hits, 1 << n)


def _word_stream(seed: int):
    """64-bit words from SHA-256(seed as 16-byte signed big-endian || counter)."""
    key = seed.to_bytes(16, "big", signed=True)
    counter = 0
    while True:
        digest = hashlib.sha256(key + counter.to_bytes(8, "big")).digest()
        for i in range(0, 32, 8):
            yield int.from_bytes(digest[i:i + 8], "big")
        counter += 1


def permutation_indices(length: int, seed: int) -> list[int]:
    """Fisher-Yates shuffle of range(length) driven by ``_word_stream``.

    For i = length-1 down to 1, j is drawn uniformly from [0, i] by
    rejection (words >= 2^64 - 2^64 mod (i+1) are skipped) and positions
    i and j are swapped.
    """
    idx = list(range(length))
    words = _word_stream(seed)
    for i in range(length - 1, 0, -1):
        bound = i + 1
        limit = (1 << 64) - (1 << 64) % bound
        w = next(words)
        while w >= limit:
            w = next(words)
        j = w % bound
        idx[i], idx[j] = idx[j], idx[i]
    return idx


def apply_seeded_permutation(x, seed: int):
    """Reorder the positions of x with the seed's permutation.

    Output position k takes input position ``permutation_indices(len, seed)[k]``.
    Accepts a BitString (returned as BitString), str, bytes or any sequence
    (returned as a list).
    """
    if isinstance(x, BitString):
        bits = x.bits()
        perm = permutation_indices(len(bits), seed)
        return BitString.from_bits([bits[i] for i in perm])
    perm = permutation_indices(len(x), seed)
    out = [x[i] for i in perm]
    if isinstance(x, str):
        return "".join(out)
    if isinstance(x, (bytes, bytearray)):
        return bytes(out)
    return out


def hash_bytes(data: bytes, seed_hex: str, ell: int, degree: int) -> str:
    """File-hashing wire format: bytes in, lowercase hex digest out."""
    field = select_modulus(degree)
    if len(data) * 8 > degree:
        raise ValueError(f"input of {len(data)} bytes exceeds {degree} bits")
    x = int.from_bytes(data, "big")
    r = int(seed_hex, 16) if seed_hex.strip() else 0
    if r >> degree:
        raise ValueError(f"seed {seed_hex} exceeds {degree} bits")
    return hash_two_universal(x, r, ell, field).hex()

"""Polynomials over GF(2) packed into Python ints (bit i = coefficient of x^i)."""

from __future__ import annotations

__all__ = [
    "clmul",
    "poly_mod",
    "poly_mulmod",
    "poly_gcd",
    "poly_degree",
    "is_irreducible",
    "is_irreducible_exhaustive",
    "prime_factors",
]

_SPREAD = [int(f"{b:08b}".replace("", "0")[:-1], 2) if b else 0 for b in range(256)]


def poly_degree(a: int) -> int:
    return a.bit_length() - 1


def clmul(a: int, b: int) -> int:
    """Carry-less (XOR) product of two polynomials."""
    if a.bit_count() < b.bit_count():
        a, b = b, a
    out = 0
    while b:
        low = b & -b
        out ^= a << (low.bit_length() - 1)
        b ^= low
    return out


def _square(a: int) -> int:
    # squaring over GF(2) interleaves zeros between the coefficient bits
    data = a.to_bytes((a.bit_length() + 7) // 8 or 1, "little")
    out = bytearray()
    for byte in data:
        s = _SPREAD[byte]
        out.append(s & 0xFF)
        out.append(s >> 8)
    return int.from_bytes(out, "little")


def poly_mod(a: int, m: int) -> int:
    """Remainder of a divided by m."""
    dm = m.bit_length() - 1
    if dm < 0:
        raise ZeroDivisionError("polynomial modulus is zero")
    tail = m ^ (1 << dm)
    mask = (1 << dm) - 1
    # fold the high part down using x^dm = tail; fast when tail is sparse
    if tail.bit_length() * 2 <= dm + 1:
        while a.bit_length() > dm:
            a = (a & mask) ^ clmul(a >> dm, tail)
        return a
    while a.bit_length() > dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def poly_mulmod(a: int, b: int, m: int) -> int:
    return poly_mod(clmul(a, b), m)


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _frobenius(k: int, m: int) -> int:
    """x^(2^k) mod m."""
    r = 0b10
    for _ in range(k):
        r = poly_mod(_square(r), m)
    return r


def is_irreducible(m: int) -> bool:
    """Rabin's test: m of degree n is irreducible iff x^(2^n) = x (mod m)
    and gcd(x^(2^(n/q)) - x, m) = 1 for every prime q dividing n."""
    n = poly_degree(m)
    if n < 1:
        return False
    if n == 1:
        return True
    if not m & 1:
        return False
    if _frobenius(n, m) != 0b10:
        return False
    for q in prime_factors(n):
        g = poly_gcd(m, _frobenius(n // q, m) ^ 0b10)
        if g != 1:
            return False
    return True


def is_irreducible_exhaustive(m: int) -> bool:
    """Trial division by every polynomial of degree 1..n/2 (small n only)."""
    n = poly_degree(m)
    if n < 1:
        return False
    for d in range(1, n // 2 + 1):
        for p in range(1 << d, 1 << (d + 1)):
            if poly_mod(m, p) == 0:
                return False
    return True

"""Exact integer arithmetic: baseline multipliers and residues modulo 2^q - 1.

Naturals and signed integers are plain Python ints.  The multipliers here
are the recursion base case and the oracle for every transform path, so
they are kept deliberately simple.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

WORD_BITS = 64
WORD_MASK = (1 << WORD_BITS) - 1

# Below this many words the grade-school kernel wins.  It also stays under
# CPython's own Karatsuba cutoff (70 digits of 30 bits), so leaf products
# taken with ``*`` are genuinely quadratic.
KARATSUBA_THRESHOLD = 32

Multiplier = Callable[[int, int], int]


class Gaussian(NamedTuple):
    re: int
    im: int


def _check_nat(x: int, name: str = "operand") -> None:
    if not isinstance(x, int) or x < 0:
        raise ValueError(f"{name} must be a non-negative int, got {x!r}")


def words(x: int) -> list[int]:
    """Little-endian 64-bit words of a natural, no leading zero word."""
    _check_nat(x)
    out = []
    while x:
        out.append(x & WORD_MASK)
        x >>= WORD_BITS
    return out


def from_words(ws) -> int:
    x = 0
    for w in reversed(ws):
        x = (x << WORD_BITS) | w
    return x


def word_count(x: int) -> int:
    return (x.bit_length() + WORD_BITS - 1) // WORD_BITS


def parse_hex(s: str) -> int:
    """Parse big-endian hex without prefix; a leading '-' gives a negative."""
    t = s.strip()
    neg = t.startswith("-")
    if neg:
        t = t[1:]
    if not t or any(c not in "0123456789abcdefABCDEF" for c in t):
        raise ValueError(f"not a hexadecimal number: {s!r}")
    x = int(t, 16)
    return -x if neg else x


def format_hex(x: int) -> str:
    return f"-{-x:x}" if x < 0 else f"{x:x}"


def mul_schoolbook(a: int, b: int) -> int:
    """Operand scanning over 64-bit words of the shorter factor."""
    _check_nat(a)
    _check_nat(b)
    if a.bit_length() < b.bit_length():
        a, b = b, a
    acc = 0
    shift = 0
    while b:
        w = b & WORD_MASK
        if w:
            acc += (a * w) << shift
        b >>= WORD_BITS
        shift += WORD_BITS
    return acc


def _karatsuba(a: int, b: int, threshold_bits: int) -> int:
    na = a.bit_length()
    nb = b.bit_length()
    if na < nb:
        a, b, na, nb = b, a, nb, na
    if nb <= threshold_bits:
        if na <= threshold_bits:
            return a * b
        # lopsided: slice the long factor into leaf-sized blocks
        acc = 0
        shift = 0
        mask = (1 << threshold_bits) - 1
        while a:
            acc += ((a & mask) * b) << shift
            a >>= threshold_bits
            shift += threshold_bits
        return acc
    half = ((na + WORD_BITS - 1) // WORD_BITS // 2) * WORD_BITS
    mask = (1 << half) - 1
    a0, a1 = a & mask, a >> half
    if nb <= half:
        return (_karatsuba(a1, b, threshold_bits) << half) + _karatsuba(a0, b, threshold_bits)
    b0, b1 = b & mask, b >> half
    lo = _karatsuba(a0, b0, threshold_bits)
    hi = _karatsuba(a1, b1, threshold_bits)
    mid = _karatsuba(a0 + a1, b0 + b1, threshold_bits) - lo - hi
    return (((hi << half) + mid) << half) + lo


def mul_karatsuba(a: int, b: int, threshold: int = KARATSUBA_THRESHOLD) -> int:
    _check_nat(a)
    _check_nat(b)
    if threshold < 1:
        raise ValueError("Karatsuba threshold must be at least one word")
    return _karatsuba(a, b, threshold * WORD_BITS)


def mul_base(a: int, b: int, karatsuba_threshold: int | None = KARATSUBA_THRESHOLD) -> int:
    """Exact product; Karatsuba above the threshold, schoolbook below.

    ``karatsuba_threshold=None`` disables Karatsuba entirely.
    """
    if karatsuba_threshold is None:
        return mul_schoolbook(a, b)
    return mul_karatsuba(a, b, karatsuba_threshold)


def mod_mersenne(a: int, q: int) -> int:
    """Canonical residue of a modulo 2^q - 1, by folding high bits onto low."""
    if q < 1:
        raise ValueError("q must be positive")
    m = (1 << q) - 1
    if a < 0:
        r = mod_mersenne(-a, q)
        return m - r if r else 0
    while a > m:
        a = (a & m) + (a >> q)
    return 0 if a == m else a


def mod_fermat(a: int, q: int) -> int:
    """Canonical residue of a modulo 2^q + 1, by alternating folds."""
    if q < 1:
        raise ValueError("q must be positive")
    mask = (1 << q) - 1
    neg = a < 0
    a = abs(a)
    while a >> (q + 1):
        a = (a & mask) - (a >> q)
        if a < 0:
            a, neg = -a, not neg
    m = mask + 2
    a %= m
    return (m - a) % m if neg else a


def gaussian_cyclic_mul(x: Gaussian, y: Gaussian, q: int, mul: Multiplier = mul_base) -> Gaussian:
    """Product in (Z/(2^q-1)Z)[i] with three natural products."""
    xr, xi = x
    yr, yi = y
    m = (1 << q) - 1
    for c in (xr, xi, yr, yi):
        if not 0 <= c < m:
            raise ValueError("components must be canonical residues")
    a = mul(xr, yr)
    b = mul(xi, yi)
    c = mul(xr + xi, yr + yi)
    return Gaussian(mod_mersenne(a - b, q), mod_mersenne(c - a - b, q))


def pack_digits(digits, width: int) -> int:
    """Sum of digits[i] * 2^(width*i); digits must lie in [0, 2^width)."""
    n = len(digits)
    if n <= 16:
        acc = 0
        for d in reversed(digits):
            acc = (acc << width) | d
        return acc
    h = n // 2
    return pack_digits(digits[:h], width) | (pack_digits(digits[h:], width) << (width * h))


def unpack_digits(x: int, width: int, n: int) -> list[int]:
    """The n low base-2^width digits of a natural, least significant first."""
    out = [0] * n
    mask = (1 << width) - 1

    def rec(x: int, lo: int, cnt: int) -> None:
        if cnt <= 16:
            for i in range(lo, lo + cnt):
                out[i] = x & mask
                x >>= width
            return
        h = cnt // 2
        rec(x & ((1 << (width * h)) - 1), lo, h)
        rec(x >> (width * h), lo + h, cnt - h)

    rec(x, 0, n)
    return out


def overlap_add(coeffs, shift: int) -> int:
    """Sum of coeffs[i] * 2^(shift*i) for signed coefficients."""
    n = len(coeffs)
    if n <= 16:
        acc = 0
        for c in reversed(coeffs):
            acc = (acc << shift) + c
        return acc
    h = n // 2
    return overlap_add(coeffs[:h], shift) + (overlap_add(coeffs[h:], shift) << (shift * h))

"""Fixed-point complex arithmetic with rigorous rounding.

A value at precision ``p`` and exponent ``e`` is ``(u + v i) * 2**(e - p)``
with ``u*u + v*v <= 2**(2p)``, i.e. it has modulus at most ``2**e``.  Every
rounding is truncation toward zero, componentwise, so moduli never grow.

Optional error shadows (``rho``) carry a relative error bound measured in
units of ``2**e``.  They are upper bounds propagated from the per-operation
rules and never influence the computed mantissas.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Real
from typing import Sequence

from .bigint import Gaussian

MIN_PRECISION = 4


def eps(p: int) -> float:
    """Machine accuracy 2^(1-p); exact as a float for any sane p."""
    return math.ldexp(1.0, 1 - p)


def clog2(n: int) -> int:
    """Ceiling base-2 logarithm, lg(1) = 0."""
    if n < 1:
        raise ValueError("clog2 needs a positive integer")
    return (n - 1).bit_length()


def tz_shift(x: int, s: int) -> int:
    """x / 2^s rounded toward zero."""
    return x >> s if x >= 0 else -((-x) >> s)


def round_toward_zero(x):
    """Truncate a real, or each part of a complex value, toward zero."""
    if isinstance(x, complex):
        return Gaussian(math.trunc(x.real), math.trunc(x.imag))
    if isinstance(x, tuple):
        re, im = x
        return Gaussian(math.trunc(re), math.trunc(im))
    if isinstance(x, Real):
        return math.trunc(x)
    raise TypeError(f"cannot round {type(x).__name__}")


def _up(x: float) -> float:
    return math.nextafter(x, math.inf)


def rho_add(rz: float, ru: float, p: int) -> float:
    return _up(_up((rz + ru) / 2) + eps(p))


def rho_mul(rz: float, ru: float, p: int) -> float:
    return _up(_up(_up((1 + rz) * (1 + ru)) * (1 + eps(p))) - 1)


def rho_tight(rho_in: float, k: int, p: int) -> float:
    """Bound after a tight length-2^k transform."""
    return _up(_up((1 + rho_in) * _up((1 + eps(p)) ** (3 * k - 2))) - 1)


def tight_bound(k: int, p: int) -> Fraction:
    """Exact (1+eps)^(3k-2) - 1 for a zero-error input."""
    return (1 + Fraction(2) ** (1 - p)) ** (3 * k - 2) - 1


@dataclass(frozen=True)
class FixedComplex:
    re: int
    im: int
    prec: int

    def __post_init__(self):
        if self.prec < MIN_PRECISION:
            raise ValueError(f"precision must be at least {MIN_PRECISION}")
        if self.re * self.re + self.im * self.im > 1 << (2 * self.prec):
            raise ValueError("mantissa exceeds the unit disc")

    @classmethod
    def from_value(cls, re, im, p: int) -> "FixedComplex":
        """Truncated representation of re + im*i (rationals or floats)."""
        r = math.trunc(Fraction(re) * (1 << p))
        i = math.trunc(Fraction(im) * (1 << p))
        return cls(r, i, p)

    @classmethod
    def one(cls, p: int) -> "FixedComplex":
        return cls(1 << p, 0, p)

    @classmethod
    def unit_i(cls, p: int) -> "FixedComplex":
        return cls(0, 1 << p, p)

    @property
    def eps(self) -> float:
        return eps(self.prec)

    def value(self, e: int = 0) -> tuple[Fraction, Fraction]:
        scale = Fraction(2) ** (e - self.prec)
        return self.re * scale, self.im * scale

    def __complex__(self) -> complex:
        return complex(math.ldexp(self.re, -self.prec), math.ldexp(self.im, -self.prec))


def fp_add(z: FixedComplex, u: FixedComplex) -> FixedComplex:
    """(z + u) at exponent e+1 when both operands sit at exponent e."""
    _same_prec(z, u)
    return FixedComplex(tz_shift(z.re + u.re, 1), tz_shift(z.im + u.im, 1), z.prec)


def fp_sub(z: FixedComplex, u: FixedComplex) -> FixedComplex:
    _same_prec(z, u)
    return FixedComplex(tz_shift(z.re - u.re, 1), tz_shift(z.im - u.im, 1), z.prec)


def fp_mul(z: FixedComplex, u: FixedComplex) -> FixedComplex:
    """Product at exponent e_z + e_u."""
    _same_prec(z, u)
    p = z.prec
    re = z.re * u.re - z.im * u.im
    im = z.re * u.im + z.im * u.re
    return FixedComplex(tz_shift(re, p), tz_shift(im, p), p)


def _same_prec(z: FixedComplex, u: FixedComplex) -> None:
    if z.prec != u.prec:
        raise ValueError("mixed precisions")


def fp_sqrt(z: FixedComplex) -> FixedComplex:
    """Square root on the closed upper half plane, within eps of the truth.

    Uses the half-angle formulas with exact integer square roots carried
    p + 8 bits beyond the target, then truncates.
    """
    x, y, p = z.re, z.im, z.prec
    if y < 0:
        raise ValueError("fp_sqrt needs a non-negative imaginary part")
    g = p + 8
    r = math.isqrt((x * x + y * y) << (2 * g))
    xs = x << g
    a = math.isqrt(max(0, r + xs) << (p + g - 1))
    b = math.isqrt(max(0, r - xs) << (p + g - 1))
    return FixedComplex(a >> g, b >> g, p)


@dataclass(frozen=True)
class FixedVector:
    """Mantissa vectors sharing one precision and one exponent."""

    re: Sequence[int]
    im: Sequence[int]
    exp: int
    prec: int
    rho: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.re) != len(self.im):
            raise ValueError("real and imaginary parts differ in length")
        if self.prec < MIN_PRECISION:
            raise ValueError(f"precision must be at least {MIN_PRECISION}")

    def __len__(self) -> int:
        return len(self.re)

    def __getitem__(self, i: int) -> FixedComplex:
        return FixedComplex(self.re[i], self.im[i], self.prec)

    @classmethod
    def from_elements(cls, elems: Sequence[FixedComplex], exp: int = 0,
                      rho: float | None = None) -> "FixedVector":
        if not elems:
            raise ValueError("empty vector")
        p = elems[0].prec
        if any(z.prec != p for z in elems):
            raise ValueError("mixed precisions")
        return cls([z.re for z in elems], [z.im for z in elems], exp, p, rho)

    @classmethod
    def zeros(cls, n: int, p: int, exp: int = 0) -> "FixedVector":
        return cls([0] * n, [0] * n, exp, p, None)

    def elements(self) -> list[FixedComplex]:
        return [FixedComplex(r, i, self.prec) for r, i in zip(self.re, self.im)]

    @property
    def eps(self) -> float:
        return eps(self.prec)

    def with_exp(self, exp: int) -> "FixedVector":
        return FixedVector(self.re, self.im, exp, self.prec, self.rho)

    def values(self) -> list[tuple[Fraction, Fraction]]:
        """Exact represented values."""
        scale = Fraction(2) ** (self.exp - self.prec)
        return [(r * scale, i * scale) for r, i in zip(self.re, self.im)]

    def check(self) -> None:
        """Assert the unit-disc bound on every element."""
        bound = 1 << (2 * self.prec)
        for j, (r, i) in enumerate(zip(self.re, self.im)):
            if r * r + i * i > bound:
                raise AssertionError(f"element {j} exceeds the unit disc")


def vec_mul(a: FixedVector, b: FixedVector) -> FixedVector:
    """Elementwise fixed-point product at exponent a.exp + b.exp."""
    if a.prec != b.prec:
        raise ValueError("mixed precisions")
    if len(a) != len(b):
        raise ValueError("length mismatch")
    re, im = mul_lists(a.re, a.im, b.re, b.im, a.prec)
    rho = None
    if a.rho is not None and b.rho is not None:
        rho = rho_mul(a.rho, b.rho, a.prec)
    return FixedVector(re, im, a.exp + b.exp, a.prec, rho)


def mul_lists(ar, ai, br, bi, p: int) -> tuple[list[int], list[int]]:
    """Mantissa kernel of elementwise fp_mul."""
    re = []
    im = []
    for x, y, u, v in zip(ar, ai, br, bi):
        s = x * u - y * v
        t = x * v + y * u
        re.append(s >> p if s >= 0 else -((-s) >> p))
        im.append(t >> p if t >= 0 else -((-t) >> p))
    return re, im


def fp_convolve_exact(z: FixedVector, u: FixedVector) -> FixedVector:
    """Cyclic convolution with exact accumulation and a single rounding."""
    n = len(z)
    if n != len(u):
        raise ValueError("length mismatch")
    if n & (n - 1) or n < 2:
        raise ValueError("length must be a power of two, at least 2")
    if z.prec != u.prec:
        raise ValueError("mixed precisions")
    p = z.prec
    k = n.bit_length() - 1
    s = p + k
    re = []
    im = []
    for i in range(n):
        sr = 0
        si = 0
        for j in range(n):
            x, y = z.re[j], z.im[j]
            c, d = u.re[i - j], u.im[i - j]
            sr += x * c - y * d
            si += x * d + y * c
        re.append(tz_shift(sr, s))
        im.append(tz_shift(si, s))
    rho = None
    if z.rho is not None and u.rho is not None:
        rho = rho_mul(z.rho, u.rho, p)
    return FixedVector(re, im, z.exp + u.exp + k, p, rho)


@lru_cache(maxsize=64)
def root_table(k: int, p: int) -> FixedVector:
    """Powers 1, w, ..., w^(2^k - 1) of w = exp(2 pi i / 2^k) at precision p.

    Built by repeated square roots at working precision p + lg p + 2 using
    quarter rotations where possible, then truncated to p bits.  Entries
    1 and i are exact; the lower half plane is the exact negation of the
    upper.  The result is cached and must be treated as read-only.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if p < MIN_PRECISION:
        raise ValueError(f"precision must be at least {MIN_PRECISION}")
    if p < k:
        raise ValueError(f"precision {p} is below the table order exponent {k}")
    n = 1 << k
    if k == 0:
        return FixedVector((1 << p,), (0,), 0, p, 0.0)
    if k == 1:
        return FixedVector((1 << p, -(1 << p)), (0, 0), 0, p, 0.0)
    pw = p + clog2(p) + 2
    half = n // 2
    quarter = n // 4
    re = [0] * half
    im = [0] * half
    re[0] = 1 << pw
    im[quarter] = 1 << pw
    for ell in range(k - 3, -1, -1):
        step = 1 << ell
        limit = 1 << (k - ell - 2)
        for i in range(1, 1 << (k - ell - 1), 2):
            j = i * step
            if i < limit:
                s = fp_sqrt(FixedComplex(re[2 * j], im[2 * j], pw))
                re[j], im[j] = s.re, s.im
            else:
                t = j - quarter
                re[j], im[j] = -im[t], re[t]
    d = pw - p
    re = [tz_shift(x, d) for x in re]
    im = [tz_shift(x, d) for x in im]
    re += [-x for x in re]
    im += [-x for x in im]
    return FixedVector(tuple(re), tuple(im), 0, p, eps(p))

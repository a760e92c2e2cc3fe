"""DFTs over fixed-point vectors: butterflies, composed plans, oracles.

A plan splits a length 2^k transform into levels of length 2^r_1, ...,
2^r_d.  Level d is innermost: it runs first on the stride-(n/2^r_d)
subsequences, the results are multiplied by twiddle factors, and the
remaining levels handle the outer transforms.  Every level is either a
radix-2 butterfly chain or a Bluestein-Kronecker short transform.
Forward transforms use w = exp(2 pi i / n), inverse ones its conjugate;
each level adds r_j to the exponent, so a full transform adds k.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import mpmath

from . import short_dft
from .fixed import (FixedComplex, FixedVector, fp_add, fp_sub, mul_lists, rho_mul,
                    rho_tight, root_table, tz_shift)

BUTTERFLY = "butterfly"
BLUESTEIN = "bluestein"


@lru_cache(maxsize=64)
def directed_roots(k: int, p: int, inverse: bool) -> FixedVector:
    """Root table for w or, when inverse, its conjugate."""
    t = root_table(k, p)
    if not inverse:
        return t
    return FixedVector(t.re, tuple(-x for x in t.im), 0, p, t.rho)


def dft_exact(values: Sequence[tuple], roots: Sequence[tuple]) -> list[tuple]:
    """O(n^2) DFT in exact arithmetic over (re, im) pairs.

    ``roots[j]`` must hold w^j for j < n; entries may be ints or Fractions.
    """
    n = len(values)
    out = []
    for i in range(n):
        sr = 0
        si = 0
        for j, (x, y) in enumerate(values):
            c, d = roots[(i * j) % n]
            sr += x * c - y * d
            si += x * d + y * c
        out.append((sr, si))
    return out


def dft_direct(a: FixedVector, omega: FixedVector) -> FixedVector:
    """O(n^2) fixed-point DFT: exact accumulation, one rounding, exponent e + k."""
    n = len(a)
    if len(omega) != n:
        raise ValueError("root table length must match the vector")
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    if a.prec != omega.prec:
        raise ValueError("mixed precisions")
    k = n.bit_length() - 1
    s = a.prec + k
    re = []
    im = []
    for i in range(n):
        sr = 0
        si = 0
        for j in range(n):
            x, y = a.re[j], a.im[j]
            c, d = omega.re[(i * j) % n], omega.im[(i * j) % n]
            sr += x * c - y * d
            si += x * d + y * c
        re.append(tz_shift(sr, s))
        im.append(tz_shift(si, s))
    rho = None
    if a.rho is not None and omega.rho is not None:
        rho = rho_mul(a.rho, omega.rho, a.prec)
    return FixedVector(re, im, a.exp + k, a.prec, rho)


def butterfly(a0: FixedComplex, a1: FixedComplex) -> tuple[FixedComplex, FixedComplex]:
    """(a0 + a1, a0 - a1), both at exponent e + 1."""
    return fp_add(a0, a1), fp_sub(a0, a1)


def _half(x: int) -> int:
    return x >> 1 if x >= 0 else -((-x) >> 1)


def butterfly_chain(re: list[int], im: list[int], length: int, roots: FixedVector,
                    stride: int, p: int) -> None:
    """In-place radix-2 decimation-in-frequency FFTs on consecutive blocks.

    ``roots[stride * j]`` must be the j-th power of a primitive
    ``length``-th root of unity.  The output is in natural order.
    """
    total = len(re)
    rre, rim = roots.re, roots.im
    h = length >> 1
    while h:
        span = h << 1
        tstep = stride * (length // span)
        blocks = total // span
        if h >= blocks:
            wr = rre[0:tstep * h:tstep]
            wi = rim[0:tstep * h:tstep]
            for start in range(0, total, span):
                mid = start + h
                end = start + span
                xr, xi = re[start:mid], im[start:mid]
                yr, yi = re[mid:end], im[mid:end]
                re[start:mid] = [s >> 1 if (s := a + b) >= 0 else -((-s) >> 1) for a, b in zip(xr, yr)]
                im[start:mid] = [s >> 1 if (s := a + b) >= 0 else -((-s) >> 1) for a, b in zip(xi, yi)]
                dr = [s >> 1 if (s := a - b) >= 0 else -((-s) >> 1) for a, b in zip(xr, yr)]
                di = [s >> 1 if (s := a - b) >= 0 else -((-s) >> 1) for a, b in zip(xi, yi)]
                re[mid:end] = [s >> p if (s := x * c - y * d) >= 0 else -((-s) >> p)
                               for x, y, c, d in zip(dr, di, wr, wi)]
                im[mid:end] = [s >> p if (s := x * d + y * c) >= 0 else -((-s) >> p)
                               for x, y, c, d in zip(dr, di, wr, wi)]
        else:
            for t in range(h):
                xr, xi = re[t::span], im[t::span]
                yr, yi = re[t + h::span], im[t + h::span]
                re[t::span] = [s >> 1 if (s := a + b) >= 0 else -((-s) >> 1) for a, b in zip(xr, yr)]
                im[t::span] = [s >> 1 if (s := a + b) >= 0 else -((-s) >> 1) for a, b in zip(xi, yi)]
                dr = [s >> 1 if (s := a - b) >= 0 else -((-s) >> 1) for a, b in zip(xr, yr)]
                di = [s >> 1 if (s := a - b) >= 0 else -((-s) >> 1) for a, b in zip(xi, yi)]
                if t:
                    c = rre[t * tstep]
                    d = rim[t * tstep]
                    dr, di = ([s >> p if (s := x * c - y * d) >= 0 else -((-s) >> p)
                               for x, y in zip(dr, di)],
                              [s >> p if (s := x * d + y * c) >= 0 else -((-s) >> p)
                               for x, y in zip(dr, di)])
                re[t + h::span] = dr
                im[t + h::span] = di
        h >>= 1
    if length > 2:
        perm = _bit_reversal(length)
        idx = [start + j for start in range(0, total, length) for j in perm]
        re[:] = [re[i] for i in idx]
        im[:] = [im[i] for i in idx]


@lru_cache(maxsize=32)
def _bit_reversal(n: int) -> tuple[int, ...]:
    bits = n.bit_length() - 1
    return tuple(int(format(i, f"0{bits}b")[::-1], 2) for i in range(n))


def fft_pow2(a: FixedVector, inverse: bool = False) -> FixedVector:
    """Tight radix-2 transform of length 2^k (all-butterfly plan)."""
    n = len(a)
    if n < 1 or n & (n - 1):
        raise ValueError("length must be a power of two")
    k = n.bit_length() - 1
    if k == 0:
        return a
    roots = directed_roots(k, a.prec, inverse)
    re, im = list(a.re), list(a.im)
    butterfly_chain(re, im, n, roots, 1, a.prec)
    rho = None if a.rho is None else rho_tight(a.rho, k, a.prec)
    return FixedVector(re, im, a.exp + k, a.prec, rho)


@dataclass(frozen=True)
class Level:
    r: int
    kind: str
    tables: short_dft.BluesteinTables | None = None
    packing: short_dft.KroneckerPacking | None = None


@dataclass
class DftPlan:
    k: int
    prec: int
    levels: tuple[Level, ...]
    inverse: bool
    roots: FixedVector
    twiddles: list[tuple[list[int], list[int]]] = field(default_factory=list)

    @property
    def factors(self) -> tuple[int, ...]:
        return tuple(lv.r for lv in self.levels)

    @property
    def kinds(self) -> tuple[str, ...]:
        return tuple(lv.kind for lv in self.levels)

    @property
    def length(self) -> int:
        return 1 << self.k


def default_factors(k: int, r: int) -> tuple[list[int], list[str]]:
    """Groups of r layers as short transforms, the rest as one butterfly chain."""
    r = max(1, min(r, k))
    d = -(-k // r)
    factors = [r] * (d - 1) + [k - (d - 1) * r]
    kinds = [BLUESTEIN if (j < d - 1 and r >= 3) else BUTTERFLY for j in range(d)]
    return factors, kinds


def make_plan(k: int, p: int, factors: Sequence[int] | None = None,
              kinds: Sequence[str] | None = None, inverse: bool = False,
              short_exponent: int = 6,
              packing_for: Callable[[int, int], short_dft.KroneckerPacking] | None = None
              ) -> DftPlan:
    """Build a plan with root, twiddle and chirp tables.

    ``packing_for(r, p)`` chooses the Kronecker slot layout of each short
    level (default: b = 2p + r + 6).
    """
    if k < 1:
        raise ValueError("transform exponent must be at least 1")
    if factors is None:
        factors, dk = default_factors(k, short_exponent)
        kinds = dk if kinds is None else kinds
    factors = list(factors)
    if kinds is None:
        kinds = [BUTTERFLY] * len(factors)
    if len(kinds) != len(factors) or sum(factors) != k or min(factors) < 1:
        raise ValueError("factors must be positive and sum to k")
    if packing_for is None:
        packing_for = short_dft.kronecker_packing
    levels = []
    for r, kind in zip(factors, kinds):
        if kind == BLUESTEIN:
            if r < 3:
                raise ValueError("short transforms need r >= 3")
            levels.append(Level(r, kind, short_dft.bluestein_tables(r, p, inverse), packing_for(r, p)))
        elif kind == BUTTERFLY:
            levels.append(Level(r, kind))
        else:
            raise ValueError(f"unknown level kind {kind!r}")
    plan = DftPlan(k, p, tuple(levels), inverse, directed_roots(k, p, inverse))
    return build_twiddles(plan, plan.roots)


def build_twiddles(plan: DftPlan, roots: FixedVector) -> DftPlan:
    """Fill twiddle tables w_N^(i1 i2) for each composition step by indexing."""
    n = plan.length
    if len(roots) != n:
        raise ValueError("root table order does not match the plan")
    rre, rim = roots.re, roots.im
    plan.twiddles = []
    total = plan.levels[0].r
    for lv in plan.levels[1:]:
        total += lv.r
        n2 = 1 << lv.r
        n1 = 1 << (total - lv.r)
        stride = n >> total
        idx = [(i1 * i2 * stride) % n for i1 in range(n1) for i2 in range(n2)]
        plan.twiddles.append(([rre[j] for j in idx], [rim[j] for j in idx]))
    return plan


def _transpose(re: list[int], im: list[int], rows: int, cols: int) -> tuple[list[int], list[int]]:
    """Transpose consecutive row-major rows x cols blocks."""
    size = rows * cols
    outr: list[int] = []
    outi: list[int] = []
    for start in range(0, len(re), size):
        end = start + size
        for c in range(cols):
            outr += re[start + c:end:cols]
            outi += im[start + c:end:cols]
    return outr, outi


def _run_level(plan: DftPlan, level: Level, re: list[int], im: list[int],
               multiplier, convolve) -> tuple[list[int], list[int]]:
    n = 1 << level.r
    if level.kind == BUTTERFLY:
        re = list(re)
        im = list(im)
        butterfly_chain(re, im, n, plan.roots, plan.length >> level.r, plan.prec)
        return re, im
    conv = None
    if convolve is not None:
        conv = convolve(plan.prec, level.r)
    return short_dft.dft_short_batch(re, im, level.tables, level.packing, multiplier, conv)


def _execute(plan: DftPlan, depth: int, re: list[int], im: list[int], multiplier, convolve):
    levels = plan.levels[:depth]
    if depth == 1:
        return _run_level(plan, levels[0], re, im, multiplier, convolve)
    last = levels[-1]
    n2 = 1 << last.r
    n1 = 1 << sum(lv.r for lv in levels[:-1])
    # inner transforms on the stride-n1 subsequences
    re, im = _transpose(re, im, n2, n1)
    re, im = _run_level(plan, last, re, im, multiplier, convolve)
    twr, twi = plan.twiddles[depth - 2]
    reps = len(re) // (n1 * n2)
    re, im = mul_lists(re, im, twr * reps, twi * reps, plan.prec)
    # outer transforms over the columns
    re, im = _transpose(re, im, n1, n2)
    re, im = _execute(plan, depth - 1, re, im, multiplier, convolve)
    return _transpose(re, im, n2, n1)


def plan_rho(plan: DftPlan, rho: float | None) -> float | None:
    """Shadow bound after running ``plan`` on an input with bound ``rho``."""
    if rho is None:
        return None
    p = plan.prec
    rho = rho_tight(rho, plan.levels[-1].r, p)
    for lv in reversed(plan.levels[:-1]):
        rho = rho_mul(rho, plan.roots.rho, p)
        rho = rho_tight(rho, lv.r, p)
    return rho


def compose_execute(plan: DftPlan, a, multiplier=None, convolve=None):
    """Run ``plan`` on one FixedVector or a list of them.

    Short levels see the whole batch at once, so each level prepares its
    chirp operand a single time.  ``convolve`` optionally substitutes the
    direct convolution for the Kronecker step (cross-checking only).
    """
    single = isinstance(a, FixedVector)
    batch = [a] if single else list(a)
    n = plan.length
    for v in batch:
        if len(v) != n:
            raise ValueError(f"vector of length {len(v)} does not fit a plan of length {n}")
        if v.prec != plan.prec:
            raise ValueError("vector precision differs from the plan")
    if multiplier is None:
        multiplier = short_dft.BaseMultiplier()
    re = [x for v in batch for x in v.re]
    im = [x for v in batch for x in v.im]
    re, im = _execute(plan, len(plan.levels), re, im, multiplier, convolve)
    out = [FixedVector(re[j * n:(j + 1) * n], im[j * n:(j + 1) * n], v.exp + plan.k, v.prec,
                       plan_rho(plan, v.rho))
           for j, v in enumerate(batch)]
    return out[0] if single else out


def tight_exponent(k: int) -> int:
    return 3 * k - 2


def max_relative_error(approx: FixedVector, exact: Sequence[tuple]) -> Fraction:
    """max_i |approx_i - exact_i| / 2^exp, exact values given as rationals."""
    scale = Fraction(2) ** approx.exp
    worst = Fraction(0)
    for (x, y), (u, v) in zip(approx.values(), exact):
        d = ((x - u) ** 2 + (y - v) ** 2) / scale ** 2
        if d > worst:
            worst = d
    return _sqrt_up(worst)


def _sqrt_up(x: Fraction) -> Fraction:
    """A rational upper bound on sqrt(x), tight to about 2^-200 relative."""
    if x == 0:
        return Fraction(0)
    num = x.numerator << 400
    s = _isqrt_ceil(num * x.denominator)
    return Fraction(s, x.denominator << 200)


def _isqrt_ceil(n: int) -> int:
    import math
    s = math.isqrt(n)
    return s if s * s == n else s + 1


# high-precision oracles


@dataclass(frozen=True)
class ReferenceDft:
    """Unnormalised DFT outputs (re + i im) 2^(exp - bits) of a vector at exponent exp.

    ``error_bound`` bounds |reference - exact DFT| / 2^(exp + k) for every output.
    """

    re: list[int]
    im: list[int]
    bits: int
    k: int
    error_bound: Fraction


@lru_cache(maxsize=16)
def reference_roots(k: int, bits: int, inverse: bool = False) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """w^j 2^bits rounded to nearest for j < 2^k, from mpmath at extra precision."""
    n = 1 << k
    sign = -1 if inverse else 1
    re = []
    im = []
    with mpmath.mp.workprec(bits + 32):
        scale = mpmath.mpf(2) ** bits
        for j in range(n):
            t = 2 * mpmath.pi * j / n
            re.append(int(mpmath.nint(mpmath.cos(t) * scale)))
            im.append(sign * int(mpmath.nint(mpmath.sin(t) * scale)))
    return tuple(re), tuple(im)


def _lift(a: FixedVector, bits: int) -> tuple[list[int], list[int]]:
    if bits < a.prec:
        raise ValueError("reference precision must not be below the vector precision")
    s = bits - a.prec
    return [x << s for x in a.re], [y << s for y in a.im]


def reference_dft(a: FixedVector, inverse: bool = False, guard: int = 64) -> ReferenceDft:
    """Radix-2 DFT at p + guard bits with nearest rounding.

    Inputs inside the unit disc make every stage-s value at most 2^s in
    modulus; each stage adds at most 2^(s+1) |w~ - w| + 1/sqrt2 ulp and at
    most doubles earlier errors, giving (k + 1) 2^-bits after normalising.
    """
    n = len(a)
    if n < 1 or n & (n - 1):
        raise ValueError("length must be a power of two")
    k = n.bit_length() - 1
    bits = a.prec + guard
    re, im = _lift(a, bits)
    wr, wi = reference_roots(k, bits, inverse)
    half = 1 << (bits - 1)
    h = n >> 1
    while h:
        span = h << 1
        step = n // span
        for t in range(h):
            xr, xi = re[t::span], im[t::span]
            yr, yi = re[t + h::span], im[t + h::span]
            re[t::span] = [a + b for a, b in zip(xr, yr)]
            im[t::span] = [a + b for a, b in zip(xi, yi)]
            dr = [a - b for a, b in zip(xr, yr)]
            di = [a - b for a, b in zip(xi, yi)]
            if t:
                c = wr[t * step]
                d = wi[t * step]
                dr, di = ([(x * c - y * d + half) >> bits for x, y in zip(dr, di)],
                          [(x * d + y * c + half) >> bits for x, y in zip(dr, di)])
            re[t + h::span] = dr
            im[t + h::span] = di
        h >>= 1
    perm = _bit_reversal(n) if n > 1 else (0,)
    return ReferenceDft([re[i] for i in perm], [im[i] for i in perm], bits, k,
                        Fraction(k + 2, 1 << bits))


def reference_dft_direct(a: FixedVector, inverse: bool = False, guard: int = 64) -> ReferenceDft:
    """O(n^2) DFT: exact sums of exact inputs times roots rounded at p + guard bits."""
    n = len(a)
    if n < 1 or n & (n - 1):
        raise ValueError("length must be a power of two")
    k = n.bit_length() - 1
    bits = a.prec + guard
    re, im = _lift(a, bits)
    wr, wi = reference_roots(k, bits, inverse)
    out = dft_exact(list(zip(re, im)), list(zip(wr, wi)))
    half = 1 << (bits - 1)
    return ReferenceDft([(x + half) >> bits for x, _ in out], [(y + half) >> bits for _, y in out],
                        bits, k, Fraction(2, 1 << bits))


def reference_distance(approx: FixedVector, ref: ReferenceDft, exp: int) -> Fraction:
    """max_i |approx_i - ref_i| / 2^(exp + k) for a reference of an input at exponent exp."""
    if len(approx) != len(ref.re):
        raise ValueError("length mismatch")
    k, bits = ref.k, ref.bits
    # both sides in units of 2^(exp - bits)
    shift = approx.exp - approx.prec - exp + bits
    if shift < 0:
        raise ValueError("reference precision is too low for this output")
    worst = 0
    for x, y, u, v in zip(approx.re, approx.im, ref.re, ref.im):
        dx = (x << shift) - u
        dy = (y << shift) - v
        d = dx * dx + dy * dy
        if d > worst:
            worst = d
    return _sqrt_up(Fraction(worst, 1 << (2 * (bits + k))))


def reference_gap(a: ReferenceDft, b: ReferenceDft) -> Fraction:
    """max_i |a_i - b_i| / 2^k for two references of the same input."""
    if (a.k, a.bits) != (b.k, b.bits) or len(a.re) != len(b.re):
        raise ValueError("references differ in shape")
    worst = max((x - u) ** 2 + (y - v) ** 2 for x, y, u, v in zip(a.re, a.im, b.re, b.im))
    return _sqrt_up(Fraction(worst, 1 << (2 * (a.bits + a.k))))


def certified_error(approx: FixedVector, ref: ReferenceDft, exp: int) -> Fraction:
    """Upper bound on the error of ``approx`` against the exact DFT, relative to 2^(exp + k)."""
    return reference_distance(approx, ref, exp) + ref.error_bound

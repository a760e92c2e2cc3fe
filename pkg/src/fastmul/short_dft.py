"""Short DFTs through Bluestein's chirp and Kronecker substitution.

A length 2^r transform is rewritten as

    a_hat[i] = f[i] * sum_j (a[j] f[j]) g[i - j],   f[i] = eta^(i^2), g[i] = eta^(-i^2)

with eta^2 = omega.  The cyclic convolution of the two Gaussian-integer
mantissa vectors is evaluated exactly as one product in (Z/(2^(nb)-1)Z)[i]
after packing the coefficients into b-bit slots, then rounded once.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

from .bigint import (Gaussian, Multiplier, mod_mersenne, mul_base, pack_digits,
                     unpack_digits)
from .fixed import FixedVector, mul_lists, rho_mul, root_table


@dataclass(frozen=True)
class BluesteinTables:
    r: int
    prec: int
    inverse: bool
    f: FixedVector
    g: FixedVector

    @property
    def eta_order(self) -> int:
        return 2 << self.r


@lru_cache(maxsize=128)
def bluestein_tables(r: int, p: int, inverse: bool = False) -> BluesteinTables:
    """Chirp tables read off a 2^(r+1)-th root table by i -> i^2 mod 2^(r+1)."""
    if r < 1:
        raise ValueError("r must be at least 1")
    if p < r + 1:
        raise ValueError(f"precision {p} too small for chirp order 2^{r + 1}")
    t = root_table(r + 1, p)
    n = 1 << r
    m = 2 * n - 1
    sign = -1 if inverse else 1
    fi = [(i * i) & m for i in range(n)]
    gi = [(-i * i) & m for i in range(n)]
    f = FixedVector(tuple(t.re[j] for j in fi), tuple(sign * t.im[j] for j in fi), 0, p, t.rho)
    g = FixedVector(tuple(t.re[j] for j in gi), tuple(sign * t.im[j] for j in gi), 0, p, t.rho)
    return BluesteinTables(r, p, inverse, f, g)


@dataclass(frozen=True)
class KroneckerPacking:
    """Slot layout for packing a length-n Gaussian polynomial into one residue.

    Both coefficient parts are shifted by 2^bias_bits to make them
    non-negative before packing.
    """

    chunk_bits: int
    length: int
    bias_bits: int

    @property
    def nbits(self) -> int:
        return self.chunk_bits * self.length

    @property
    def r(self) -> int:
        return self.length.bit_length() - 1


def min_chunk_bits(r: int, p: int) -> int:
    return 2 * p + r + 6


def kronecker_packing(r: int, p: int, chunk_bits: int | None = None) -> KroneckerPacking:
    b = min_chunk_bits(r, p) if chunk_bits is None else chunk_bits
    if b < min_chunk_bits(r, p):
        raise ValueError(f"chunk of {b} bits is below 2p + r + 6 = {min_chunk_bits(r, p)}")
    return KroneckerPacking(b, 1 << r, p)


class CyclicMultiplier:
    """Exact products in (Z/(2^N-1)Z)[i], with an optional reusable operand.

    ``preparations`` counts heavy operand preparations: one per ``prepare``
    and one per ``multiply`` (the varying operand).
    """

    def __init__(self):
        self.preparations = 0

    def prepare(self, y: Gaussian, nbits: int):
        raise NotImplementedError

    def multiply(self, x: Gaussian, prepared) -> Gaussian:
        raise NotImplementedError

    def product(self, x: Gaussian, y: Gaussian, nbits: int) -> Gaussian:
        return self.multiply(x, self.prepare(y, nbits))


class BaseMultiplier(CyclicMultiplier):
    """Three natural products through an injected multiplier."""

    def __init__(self, mul: Multiplier = mul_base):
        super().__init__()
        self.mul = mul

    def prepare(self, y: Gaussian, nbits: int):
        self.preparations += 1
        u, v = y
        return nbits, u, v, u + v

    def multiply(self, x: Gaussian, prepared) -> Gaussian:
        self.preparations += 1
        nbits, u, v, w = prepared
        xr, xi = x
        mul = self.mul
        a = mul(xr, u)
        b = mul(xi, v)
        c = mul(xr + xi, w)
        return Gaussian(mod_mersenne(a - b, nbits), mod_mersenne(c - a - b, nbits))


def _pack_biased(re: Sequence[int], im: Sequence[int], packing: KroneckerPacking):
    bias = 1 << packing.bias_bits
    top = 2 * bias
    xr = [c + bias for c in re]
    xi = [c + bias for c in im]
    if min(xr) < 0 or min(xi) < 0 or max(xr) > top or max(xi) > top:
        raise ValueError("coefficient exceeds the packing bound")
    b = packing.chunk_bits
    return Gaussian(pack_digits(xr, b), pack_digits(xi, b)), (sum(re), sum(im))


class PreparedOperand:
    """Packed, biased fixed operand plus its multiplier-side preparation."""

    __slots__ = ("packing", "handle", "sigma")

    def __init__(self, packing: KroneckerPacking, handle, sigma):
        self.packing = packing
        self.handle = handle
        self.sigma = sigma


def prepare_operand(re: Sequence[int], im: Sequence[int], packing: KroneckerPacking,
                    multiplier: CyclicMultiplier) -> PreparedOperand:
    if len(re) != packing.length:
        raise ValueError("operand length does not match packing")
    packed, sigma = _pack_biased(re, im, packing)
    return PreparedOperand(packing, multiplier.prepare(packed, packing.nbits), sigma)


def kronecker_multiply(re: Sequence[int], im: Sequence[int], g: PreparedOperand,
                       multiplier: CyclicMultiplier) -> tuple[list[int], list[int]]:
    """Exact cyclic product of a Gaussian-integer polynomial with a prepared one."""
    pk = g.packing
    n = pk.length
    if len(re) != n:
        raise ValueError("operand length does not match packing")
    packed, (sr, si) = _pack_biased(re, im, pk)
    hr, hi = multiplier.multiply(packed, g.handle)
    b = pk.chunk_bits
    nbits = pk.nbits
    # real coefficients of the biased product may be negative: lift them
    off_bits = 2 * pk.bias_bits + pk.r + 2
    off = 1 << off_bits
    hr += pack_digits([off] * n, b)
    modulus = (1 << nbits) - 1
    if hr >= modulus:
        hr -= modulus
    dr = unpack_digits(hr, b, n)
    di = unpack_digits(hi, b, n)
    bias = 1 << pk.bias_bits
    gr, gi = g.sigma
    sr += gr
    si += gi
    cr = off + bias * (sr - si)
    ci = bias * (sr + si) + 2 * bias * bias * n
    return [d - cr for d in dr], [d - ci for d in di]


def kronecker_cyclic_gaussian(f: tuple[Sequence[int], Sequence[int]],
                              g: tuple[Sequence[int], Sequence[int]],
                              packing: KroneckerPacking,
                              multiplier: CyclicMultiplier | None = None):
    """Exact product of two Gaussian-integer polynomials modulo X^n - 1.

    Coefficient parts must lie in [-2^bias_bits, 2^bias_bits].
    """
    if multiplier is None:
        multiplier = BaseMultiplier()
    prepared = prepare_operand(g[0], g[1], packing, multiplier)
    return kronecker_multiply(f[0], f[1], prepared, multiplier)


def dft_short_batch(re: list[int], im: list[int], tables: BluesteinTables,
                    packing: KroneckerPacking, multiplier: CyclicMultiplier,
                    convolve: Callable | None = None) -> tuple[list[int], list[int]]:
    """Transform consecutive length-2^r blocks of flat mantissa lists.

    The chirp operand is packed and prepared once for the whole batch.
    ``convolve`` replaces the Kronecker step (used to cross-check against
    the direct convolution); it receives and returns mantissa lists.
    """
    r = tables.r
    n = 1 << r
    p = tables.prec
    if packing.length != n or packing.bias_bits != p:
        raise ValueError("packing does not match the chirp tables")
    fr, fi = tables.f.re, tables.f.im
    s = p + r
    prepared = None
    if convolve is None:
        prepared = prepare_operand(tables.g.re, tables.g.im, packing, multiplier)
    out_r: list[int] = []
    out_i: list[int] = []
    for start in range(0, len(re), n):
        ar = re[start:start + n]
        ai = im[start:start + n]
        xr, xi = mul_lists(ar, ai, fr, fi, p)
        if convolve is None:
            hr, hi = kronecker_multiply(xr, xi, prepared, multiplier)
            cr = [(h >> s) if h >= 0 else -((-h) >> s) for h in hr]
            ci = [(h >> s) if h >= 0 else -((-h) >> s) for h in hi]
        else:
            cr, ci = convolve(xr, xi, tables.g.re, tables.g.im)
        yr, yi = mul_lists(cr, ci, fr, fi, p)
        out_r += yr
        out_i += yi
    return out_r, out_i


def _check_short(a: FixedVector, tables: BluesteinTables) -> None:
    if len(a) != 1 << tables.r:
        raise ValueError("vector length does not match the chirp tables")
    if a.prec != tables.prec:
        raise ValueError("mixed precisions")
    if tables.r < 3:
        raise ValueError("short transforms below length 8 must use butterflies")


def _short_rho(rho: float | None, p: int) -> float | None:
    # premultiply, convolution and postmultiply each cost a factor (1+eps)^2
    if rho is None:
        return None
    for _ in range(6):
        rho = rho_mul(rho, 0.0, p)
    return rho


def dft_short(a: FixedVector, tables: BluesteinTables, packing: KroneckerPacking | None = None,
              multiplier: CyclicMultiplier | None = None,
              convolve: Callable | None = None) -> FixedVector:
    """Tight length-2^r DFT (r >= 3) of a single vector."""
    return dft_short_fixed([a], tables, packing, multiplier, convolve)[0]


def dft_short_fixed(batch: Sequence[FixedVector], tables: BluesteinTables,
                    packing: KroneckerPacking | None = None,
                    multiplier: CyclicMultiplier | None = None,
                    convolve: Callable | None = None) -> list[FixedVector]:
    """Transform a batch sharing one prepared chirp operand."""
    if not batch:
        return []
    for a in batch:
        _check_short(a, tables)
    if packing is None:
        packing = kronecker_packing(tables.r, tables.prec)
    if multiplier is None:
        multiplier = BaseMultiplier()
    n = 1 << tables.r
    re = [x for a in batch for x in a.re]
    im = [x for a in batch for x in a.im]
    yr, yi = dft_short_batch(re, im, tables, packing, multiplier, convolve)
    out = []
    for j, a in enumerate(batch):
        sl = slice(j * n, (j + 1) * n)
        out.append(FixedVector(yr[sl], yi[sl], a.exp + tables.r, a.prec,
                               _short_rho(a.rho, a.prec)))
    return out


def direct_convolve(p: int, r: int):
    """Convolution hook with the exact-accumulation, single-rounding rule."""
    s = p + r

    def conv(xr, xi, gr, gi):
        n = len(xr)
        outr = []
        outi = []
        for i in range(n):
            sr = 0
            si = 0
            for j in range(n):
                c, d = gr[i - j], gi[i - j]
                sr += xr[j] * c - xi[j] * d
                si += xr[j] * d + xi[j] * c
            outr.append(sr >> s if sr >= 0 else -((-sr) >> s))
            outi.append(si >> s if si >= 0 else -((-si) >> s))
        return outr, outi

    return conv

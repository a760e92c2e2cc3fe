"""Mersenne-prime machinery and Crandall-Fagin cyclic multiplication.

Field arithmetic happens in F_P[i] with P = 2^q' - 1 prime.  Since
P = 3 (mod 4), i is not a square root of -1 in F_P, so F_P[i] is a field
of order P^2 and contains roots of unity of order 2^(q'+1).

Products in (Z/(2^q-1)Z)[i][X]/(X^M - 1) are reduced to exact cyclic
convolutions over F_P[i] with the variable-base weighted splitting of
Crandall and Fagin, extended to two variables for the polynomial case.
Vectors over F_P[i] are pairs of numpy arrays: int64 when q' <= 31 (so
every product of two reduced values fits), Python ints otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from numba import njit

from .bigint import Gaussian, mod_mersenne, overlap_add, unpack_digits
from .fixed import clog2

DEFAULT_SEARCH_CAP = 4423


class SearchFailure(RuntimeError):
    pass


def lucas_lehmer(q: int) -> bool:
    """True iff 2^q - 1 is prime."""
    if q < 2:
        raise ValueError("q must be at least 2")
    if q == 2:
        return True
    m = (1 << q) - 1
    s = 4
    for _ in range(q - 2):
        s = s * s - 2
        s = (s & m) + (s >> q)
        if s >= m:
            s -= m
    return s == 0


def _is_prime_small(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, math.isqrt(q) + 1))


def find_mersenne_prime(min_exponent: int, cap: int = DEFAULT_SEARCH_CAP) -> int:
    """Smallest q' > min_exponent with 2^q' - 1 prime, searching up to ``cap``."""
    if min_exponent < 2:
        raise ValueError("min_exponent must be at least 2")
    for q in range(min_exponent + 1, cap + 1):
        # a composite exponent gives a composite Mersenne number
        if _is_prime_small(q) and lucas_lehmer(q):
            return q
    raise SearchFailure(f"no Mersenne prime exponent in ({min_exponent}, {cap}]")


# F_P[i] scalars as (re, im) pairs of Python ints

def fpi_mul(x, y, P: int):
    a, b = x
    c, d = y
    return (a * c - b * d) % P, (a * d + b * c) % P


def fpi_pow(x, e: int, P: int):
    result = (1, 0)
    while e:
        if e & 1:
            result = fpi_mul(result, x, P)
        x = fpi_mul(x, x, P)
        e >>= 1
    return result


def fpi_inv(x, P: int):
    a, b = x
    norm = (a * a + b * b) % P
    if norm == 0:
        raise ZeroDivisionError("zero has no inverse")
    t = pow(norm, -1, P)
    return a * t % P, (-b) * t % P


def root_2q1(q: int):
    """Primitive 2^(q+1)-th root of unity in F_P[i], P = 2^q - 1."""
    if q < 3:
        raise ValueError("q must be at least 3")
    if not lucas_lehmer(q):
        raise ValueError(f"2^{q} - 1 is not prime")
    P = (1 << q) - 1
    e = 1 << (q - 2)
    w = (pow(2, e, P), pow(-3 % P, e, P))
    x = w
    for _ in range(q):
        x = fpi_mul(x, x, P)
    if x != (P - 1, 0):
        raise ArithmeticError("root has the wrong order")
    return w


def element_order(x, P: int, bound_exp: int) -> int:
    """Order of x, known to divide 2^bound_exp, by repeated squaring."""
    if x == (1, 0):
        return 1
    for j in range(1, bound_exp + 1):
        x = fpi_mul(x, x, P)
        if x == (1, 0):
            return 1 << j
    raise ArithmeticError("order does not divide the bound")


def mu(q: int) -> int:
    """floor(g(q) + 3/2) with g(q) ~ log2(q) log2(log2(q))."""
    if q < 2:
        raise ValueError("q must be at least 2")
    lq = math.log2(q)
    return math.floor(lq * math.log2(lq) + 1.5)


def big_m(q: int) -> int:
    return 1 << mu(q)


def beta(n: int) -> tuple[int, int, int]:
    """Smallest q*M(q) >= n, returned with its q and M."""
    if n < 2:
        raise ValueError("n must be at least 2")
    q = 2
    while q * big_m(q) < n:
        q += 1
    return q * big_m(q), q, big_m(q)


# layouts

@dataclass(frozen=True)
class BivariateLayout:
    M: int
    N: int
    L: int
    s: int

    @property
    def ell(self) -> int:
        return self.L.bit_length() - 1


@dataclass(frozen=True)
class CrandallFaginLayout:
    q: int
    qp: int
    N: int
    e: tuple[int, ...]
    c: tuple[int, ...]
    h: int
    theta: int
    weights: tuple[int, ...]
    inv_weights: tuple[int, ...]

    @property
    def prime(self) -> int:
        return (1 << self.qp) - 1


def layout_violation(q: int, qp: int, M: int, N: int) -> str | None:
    """The first violated layout constraint, or None."""
    if N < 1 or N > q:
        return f"N = {N} must satisfy 1 <= N <= q = {q}"
    if math.gcd(N, qp) != 1:
        return f"gcd(N = {N}, q' = {qp}) must be 1"
    need = 2 * -(-q // N) + clog2(M * N) + 3
    if qp < need:
        return f"q' = {qp} < 2*ceil(q/N) + lg(MN) + 3 = {need}"
    return None


def cf_layout(q: int, qp: int, M: int = 1, N: int | None = None
              ) -> tuple[BivariateLayout, CrandallFaginLayout]:
    """Digit layout for (Z/(2^q-1)Z)[i][X]/(X^M-1) over F_P[i], P = 2^q' - 1.

    Without an explicit N, the smallest feasible N is used.
    """
    if q < 1:
        raise ValueError("q must be positive")
    if M < 1 or M & (M - 1):
        raise ValueError("M must be a power of two")
    if not lucas_lehmer(qp):
        raise ValueError(f"2^{qp} - 1 is not prime")
    if N is None:
        for cand in range(1, q + 1):
            if layout_violation(q, qp, M, cand) is None:
                N = cand
                break
        else:
            raise ValueError(f"no digit count fits: {layout_violation(q, qp, M, q)}")
    bad = layout_violation(q, qp, M, N)
    if bad:
        raise ValueError(bad)
    L = N & -N
    s = N // L
    if max(M, L) > 1 << (qp + 1) or (s > 1 and 1 << (clog2(s) + 1) > 1 << (qp + 1)):
        raise ValueError("transform lengths exceed the available roots of unity")
    P = (1 << qp) - 1
    e = tuple(-(-q * i // N) for i in range(N + 1))
    c = tuple(N * e[i] - q * i for i in range(N))
    h = pow(N, -1, qp)
    theta = pow(2, h, P)
    if pow(theta, N, P) != 2:
        raise ArithmeticError("theta^N != 2")
    weights = [1] * N
    inv_weights = [1] * N
    tinv = pow(theta, -1, P)
    # weights by O(N) multiplications along increasing c
    powers = [1] * N
    powers_inv = [1] * N
    for j in range(1, N):
        powers[j] = powers[j - 1] * theta % P
        powers_inv[j] = powers_inv[j - 1] * tinv % P
    for i in range(N):
        weights[i] = powers[c[i]]
        inv_weights[i] = powers_inv[c[i]]
    return (BivariateLayout(M, N, L, s),
            CrandallFaginLayout(q, qp, N, e, c, h, theta, tuple(weights), tuple(inv_weights)))


def split_digits(x: int, layout: CrandallFaginLayout) -> list[int]:
    e = layout.e
    return [(x >> e[j]) & ((1 << (e[j + 1] - e[j])) - 1) for j in range(layout.N)]


def join_digits(ds: Sequence[int], layout: CrandallFaginLayout) -> int:
    return sum(d << layout.e[j] for j, d in enumerate(ds))


# vector arithmetic over F_P[i]

def _dtype(qp: int):
    return np.int64 if qp <= 31 else object


def _red(x, qp: int):
    """Reduce a non-negative array modulo 2^qp - 1 to canonical form."""
    P = (1 << qp) - 1
    if x.dtype == np.int64:
        # inputs stay below 2^63, so two folds leave at most P + 4
        x = (x & P) + (x >> qp)
        x = (x & P) + (x >> qp)
        x -= P
        x += (x >> 63) & P
        return x
    while True:
        hi = x >> qp
        if not hi.any():
            break
        x = (x & P) + hi
    return np.where(x == P, 0, x)


def _addm(x, y, P):
    s = x + y
    s -= P
    if s.dtype == np.int64:
        s += (s >> 63) & P
        return s
    return np.where(s < 0, s + P, s)


def _subm(x, y, P):
    s = x - y
    if s.dtype == np.int64:
        s += (s >> 63) & P
        return s
    return np.where(s < 0, s + P, s)


def _mulm(xr, xi, yr, yi, qp: int):
    P = (1 << qp) - 1
    re = _red(xr * yr + (P - xi) * yi, qp)
    im = _red(xr * yi + xi * yr, qp)
    return re, im


@lru_cache(maxsize=256)
def _twiddles(qp: int, j: int, inverse: bool):
    """Powers w^t, t < 2^(j-1), of a primitive 2^j-th root (or its inverse)."""
    P = (1 << qp) - 1
    w = root_2q1(qp)
    for _ in range(qp + 1 - j):
        w = fpi_mul(w, w, P)
    if inverse:
        w = fpi_inv(w, P)
    half = max(1, 1 << (j - 1))
    re = [0] * half
    im = [0] * half
    x = (1, 0)
    for t in range(half):
        re[t], im[t] = x
        x = fpi_mul(x, w, P)
    dt = _dtype(qp)
    return np.array(re, dtype=dt), np.array(im, dtype=dt)


@lru_cache(maxsize=64)
def _bitrev(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    return np.array([int(format(i, f"0{bits}b")[::-1], 2) if bits else 0 for i in range(n)])


@njit(cache=True)
def _fft_kernel(re, im, wr, wi, qp):
    """In-place radix-2 DIF butterflies on axis 1 of (pre, n, post) int64 arrays.

    Entries are canonical residues below 2^31; output is in bit-reversed order.
    """
    P = (1 << qp) - 1
    pre, n, post = re.shape
    h = n >> 1
    while h:
        step = n // (2 * h)
        for a in range(pre):
            for blk in range(0, n, 2 * h):
                for t in range(h):
                    c = wr[t * step]
                    d = wi[t * step]
                    x = blk + t
                    y = x + h
                    for z in range(post):
                        xr = re[a, x, z]
                        xi = im[a, x, z]
                        yr = re[a, y, z]
                        yi = im[a, y, z]
                        sr = xr + yr
                        if sr >= P:
                            sr -= P
                        si = xi + yi
                        if si >= P:
                            si -= P
                        dr = xr - yr
                        if dr < 0:
                            dr += P
                        di = xi - yi
                        if di < 0:
                            di += P
                        re[a, x, z] = sr
                        im[a, x, z] = si
                        if t:
                            u = dr * c + (P - di) * d
                            v = dr * d + di * c
                            u = (u & P) + (u >> qp)
                            u = (u & P) + (u >> qp)
                            if u >= P:
                                u -= P
                            v = (v & P) + (v >> qp)
                            v = (v & P) + (v >> qp)
                            if v >= P:
                                v -= P
                            dr = u
                            di = v
                        re[a, y, z] = dr
                        im[a, y, z] = di
        h >>= 1


@njit(cache=True)
def _bitrev_kernel(re, im, perm):
    pre, n, post = re.shape
    for a in range(pre):
        for i in range(n):
            j = perm[i]
            if i < j:
                for z in range(post):
                    t = re[a, i, z]
                    re[a, i, z] = re[a, j, z]
                    re[a, j, z] = t
                    t = im[a, i, z]
                    im[a, i, z] = im[a, j, z]
                    im[a, j, z] = t


def fft_fpi(re, im, qp: int, inverse: bool = False, axis: int = -1):
    """Exact DFT of length 2^j along ``axis`` over F_P[i].

    The inverse uses w^-1 without scaling, so inverse(forward(a)) = 2^j a.
    """
    re = np.array(re, dtype=_dtype(qp), order="C")
    im = np.array(im, dtype=_dtype(qp), order="C")
    return _fft_inplace(re, im, qp, inverse, axis)


def _fft_inplace(re, im, qp: int, inverse: bool, axis: int):
    """fft_fpi on C-ordered arrays owned by the caller, reused for the result."""
    shape = re.shape
    axis %= re.ndim
    n = shape[axis]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    j = n.bit_length() - 1
    if j > qp + 1:
        raise ValueError(f"length 2^{j} exceeds the root order 2^{qp + 1}")
    if j == 0:
        return re, im
    P = (1 << qp) - 1
    pre = math.prod(shape[:axis])
    post = math.prod(shape[axis + 1:])
    wr, wi = _twiddles(qp, j, inverse)
    if re.dtype == np.int64:
        r3 = re.reshape(pre, n, post)
        i3 = im.reshape(pre, n, post)
        _fft_kernel(r3, i3, wr, wi, qp)
        _bitrev_kernel(r3, i3, _bitrev(n))
        return re, im
    h = n >> 1
    while h:
        blocks = n // (2 * h)
        r5 = re.reshape(pre, blocks, 2, h, post)
        i5 = im.reshape(pre, blocks, 2, h, post)
        xr, yr = r5[:, :, 0], r5[:, :, 1]
        xi, yi = i5[:, :, 0], i5[:, :, 1]
        dr, di = _subm(xr, yr, P), _subm(xi, yi, P)
        r5[:, :, 0] = _addm(xr, yr, P)
        i5[:, :, 0] = _addm(xi, yi, P)
        if h > 1:
            tr = wr[::blocks][:h, None]
            ti = wi[::blocks][:h, None]
            dr, di = _mulm(dr, di, tr, ti, qp)
        r5[:, :, 1] = dr
        i5[:, :, 1] = di
        h >>= 1
    perm = _bitrev(n)
    re = re.reshape(pre, n, post)[:, perm].reshape(shape)
    im = im.reshape(pre, n, post)[:, perm].reshape(shape)
    return re, im


def dft_fpi_direct(re: Sequence[int], im: Sequence[int], qp: int, inverse: bool = False):
    """O(n^2) reference DFT over F_P[i] with the same root as fft_fpi."""
    n = len(re)
    j = n.bit_length() - 1
    P = (1 << qp) - 1
    w = root_2q1(qp)
    for _ in range(qp + 1 - j):
        w = fpi_mul(w, w, P)
    if inverse:
        w = fpi_inv(w, P)
    out = []
    for i in range(n):
        acc = (0, 0)
        for t in range(n):
            x = fpi_mul((int(re[t]), int(im[t])), fpi_pow(w, i * t, P), P)
            acc = ((acc[0] + x[0]) % P, (acc[1] + x[1]) % P)
        out.append(acc)
    return out


def _scale(re, im, c: int, qp: int):
    return _red(re * c, qp), _red(im * c, qp)


def _ring_mul(ar, ai, br, bi, s: int, qp: int):
    """Pointwise products in F_P[i][U]/(U^s - 1) along the last axis."""
    if s == 1:
        return _mulm(ar, ai, br, bi, qp)
    P = (1 << qp) - 1
    size = 1 << (clog2(s) + 1)

    def pad(x):
        out = np.zeros(x.shape[:-1] + (size,), dtype=x.dtype)
        out[..., :s] = x
        return out

    fa = fft_fpi(pad(ar), pad(ai), qp)
    fb = fft_fpi(pad(br), pad(bi), qp)
    cr, ci = _mulm(fa[0], fa[1], fb[0], fb[1], qp)
    cr, ci = fft_fpi(cr, ci, qp, inverse=True)
    cr, ci = _scale(cr, ci, pow(size, -1, P), qp)
    lo_r, lo_i = cr[..., :s], ci[..., :s]
    hi_r = np.zeros_like(lo_r)
    hi_i = np.zeros_like(lo_i)
    hi_r[..., :s - 1] = cr[..., s:2 * s - 1]
    hi_i[..., :s - 1] = ci[..., s:2 * s - 1]
    return _addm(lo_r, hi_r, P), _addm(lo_i, hi_i, P)


# compiled kernels for q' <= 31; residues mod 2^q - 1 travel as 32-bit limbs

LIMB = 32
LIMB_MASK = (1 << LIMB) - 1


@njit(cache=True)
def _mred(x, qp):
    P = (1 << qp) - 1
    x = (x & P) + (x >> qp)
    x = (x & P) + (x >> qp)
    if x >= P:
        x -= P
    return x


@njit(cache=True)
def _bitfield(limbs, start, width):
    """Bits [start, start + width) of a little-endian limb vector, width < 32."""
    a = start >> 5
    r = start & 31
    n = limbs.shape[0]
    if a >= n or width <= 0:
        return 0
    v = limbs[a] >> r
    if r + width > 32 and a + 1 < n:
        v |= limbs[a + 1] << (32 - r)
    return v & ((1 << width) - 1)


@njit(cache=True)
def _digits_kernel(limbs, e, N):
    """Variable-base digits of each row of an (M, nl) limb matrix."""
    M = limbs.shape[0]
    out = np.zeros((M, N), np.int64)
    for i in range(M):
        for j in range(N):
            out[i, j] = _bitfield(limbs[i], e[j], e[j + 1] - e[j])
    return out


@njit(cache=True)
def _chunk_digits_kernel(limbs, m, M, e, N):
    """Digits of the m-bit chunks of one integer given by its limbs."""
    out = np.zeros((M, N), np.int64)
    for i in range(M):
        base = i * m
        for j in range(N):
            if e[j] >= m:
                break
            top = min(e[j + 1], m)
            out[i, j] = _bitfield(limbs, base + e[j], top - e[j])
    return out


@njit(cache=True)
def _load_kernel(dr, di, wts, jl, js, L, s, qp):
    M, N = dr.shape
    ar = np.zeros((M, L, s), np.int64)
    ai = np.zeros((M, L, s), np.int64)
    for i in range(M):
        for j in range(N):
            ar[i, jl[j], js[j]] = _mred(dr[i, j] * wts[j], qp)
            ai[i, jl[j], js[j]] = _mred(di[i, j] * wts[j], qp)
    return ar, ai


@njit(cache=True)
def _fft1(re, im, wr, wi, perm, qp):
    """In-place length-n transform of 1-D buffers, natural order out."""
    P = (1 << qp) - 1
    n = re.shape[0]
    h = n >> 1
    while h:
        step = n // (2 * h)
        for blk in range(0, n, 2 * h):
            for t in range(h):
                x = blk + t
                y = x + h
                xr = re[x]
                xi = im[x]
                yr = re[y]
                yi = im[y]
                sr = xr + yr
                si = xi + yi
                re[x] = sr - P if sr >= P else sr
                im[x] = si - P if si >= P else si
                dr = xr - yr
                di = xi - yi
                if dr < 0:
                    dr += P
                if di < 0:
                    di += P
                if t:
                    c = wr[t * step]
                    d = wi[t * step]
                    dr, di = _mred(dr * c + (P - di) * d, qp), _mred(dr * d + di * c, qp)
                re[y] = dr
                im[y] = di
        h >>= 1
    for i in range(n):
        j = perm[i]
        if i < j:
            re[i], re[j] = re[j], re[i]
            im[i], im[j] = im[j], im[i]


@njit(cache=True)
def _ring_kernel(ur, ui, vr, vi, wr, wi, iwr, iwi, perm, inv_size, qp):
    """In-place products u *= v in F_P[i][U]/(U^s - 1) along the last axis.

    Uses zero-padded transforms of length 2^(lg s + 1), then folds U^(s+t)
    onto U^t; the linear product has degree < 2s - 1, so one fold suffices.
    """
    M, L, s = ur.shape
    P = (1 << qp) - 1
    size = perm.shape[0]
    ar = np.zeros(size, np.int64)
    ai = np.zeros(size, np.int64)
    br = np.zeros(size, np.int64)
    bi = np.zeros(size, np.int64)
    for m in range(M):
        for l in range(L):
            if s == 1:
                x = ur[m, l, 0]
                y = ui[m, l, 0]
                c = vr[m, l, 0]
                d = vi[m, l, 0]
                ur[m, l, 0] = _mred(x * c + (P - y) * d, qp)
                ui[m, l, 0] = _mred(x * d + y * c, qp)
                continue
            ar[:] = 0
            ai[:] = 0
            br[:] = 0
            bi[:] = 0
            ar[:s] = ur[m, l]
            ai[:s] = ui[m, l]
            br[:s] = vr[m, l]
            bi[:s] = vi[m, l]
            _fft1(ar, ai, wr, wi, perm, qp)
            _fft1(br, bi, wr, wi, perm, qp)
            for t in range(size):
                x = ar[t]
                y = ai[t]
                c = br[t]
                d = bi[t]
                ar[t] = _mred(x * c + (P - y) * d, qp)
                ai[t] = _mred(x * d + y * c, qp)
            _fft1(ar, ai, iwr, iwi, perm, qp)
            for t in range(s):
                ur[m, l, t] = _mred((ar[t] + ar[t + s]) * inv_size, qp)
                ui[m, l, t] = _mred((ai[t] + ai[t + s]) * inv_size, qp)


@njit(cache=True)
def _carry(acc):
    n = acc.shape[0]
    for l in range(n - 1):
        c = acc[l] >> 32
        acc[l] -= c << 32
        acc[l + 1] += c


@njit(cache=True)
def _reduce_mersenne(acc, q, out):
    """Canonical residue of the signed limb vector acc modulo 2^q - 1, into out."""
    n = acc.shape[0]
    _carry(acc)
    neg = acc[n - 1] < 0
    if neg:
        for l in range(n):
            acc[l] = -acc[l]
        _carry(acc)
    qa = q >> 5
    qr = q & 31
    hi = np.zeros(n, np.int64)
    while True:
        nonzero = False
        for l in range(n):
            src = l + qa
            v = 0
            if src < n:
                v = acc[src] >> qr
                if qr and src + 1 < n:
                    v |= (acc[src + 1] << (32 - qr)) & 0xFFFFFFFF
            hi[l] = v
            if v:
                nonzero = True
        if not nonzero:
            break
        for l in range(n):
            if l > qa:
                acc[l] = 0
            elif l == qa:
                acc[l] &= (1 << qr) - 1
            acc[l] += hi[l]
        _carry(acc)
    nq = out.shape[0]
    full = True
    for l in range(nq):
        width = min(32, q - 32 * l)
        if acc[l] != (1 << width) - 1:
            full = False
    for l in range(nq):
        width = min(32, q - 32 * l)
        v = 0 if full else acc[l]
        if neg and not full:
            # 2^q - 1 - x is the complement of x inside q bits
            nzero = False
            for t in range(nq):
                if acc[t]:
                    nzero = True
            if nzero:
                v = ((1 << width) - 1) - acc[l]
        out[l] = v


@njit(cache=True)
def _unload_kernel(hr, hi, iw, jl, js, e, qp, q):
    """Unweight, lift to (-P/2, P/2) and recombine digits modulo 2^q - 1."""
    M = hr.shape[0]
    N = iw.shape[0]
    P = (1 << qp) - 1
    half = P // 2
    nq = (q + 31) // 32
    nacc = (q + qp + 8) // 32 + 3
    outr = np.zeros((M, nq), np.int64)
    outi = np.zeros((M, nq), np.int64)
    accr = np.zeros(nacc, np.int64)
    acci = np.zeros(nacc, np.int64)
    peak = 0
    for i in range(M):
        accr[:] = 0
        acci[:] = 0
        for j in range(N):
            x = _mred(hr[i, jl[j], js[j]] * iw[j], qp)
            y = _mred(hi[i, jl[j], js[j]] * iw[j], qp)
            if x > half:
                x -= P
            if y > half:
                y -= P
            peak = max(peak, abs(x), abs(y))
            a = e[j] >> 5
            r = e[j] & 31
            vx = x << r
            vy = y << r
            accr[a] += vx & 0xFFFFFFFF
            accr[a + 1] += vx >> 32
            acci[a] += vy & 0xFFFFFFFF
            acci[a + 1] += vy >> 32
        _reduce_mersenne(accr, q, outr[i])
        _reduce_mersenne(acci, q, outi[i])
    return outr, outi, peak


@njit(cache=True)
def _overlap_kernel(coeffs, m, nout):
    """Limbs of sum_i c_i 2^(m i) for non-negative limb rows c_i."""
    M, nq = coeffs.shape
    out = np.zeros(nout, np.int64)
    for i in range(M):
        for l in range(nq):
            v = coeffs[i, l]
            if v == 0:
                continue
            bit = m * i + 32 * l
            a = bit >> 5
            r = bit & 31
            x = v << r
            out[a] += x & 0xFFFFFFFF
            out[a + 1] += x >> 32
    _carry(out)
    return out


def _limbs_of(values: Sequence[int], nl: int) -> np.ndarray:
    raw = b"".join(int(v).to_bytes(4 * nl, "little") for v in values)
    return np.frombuffer(raw, dtype="<u4").reshape(len(values), nl).astype(np.int64)


def _int_of_limbs(row) -> int:
    return int.from_bytes(np.asarray(row, dtype="<u4").tobytes(), "little")


def _fast_path(cf: CrandallFaginLayout) -> bool:
    return cf.qp <= 31


def _cf_core(ud, vd, biv: BivariateLayout, cf: CrandallFaginLayout):
    """Compiled pipeline on (M, N) digit matrices; returns residue limb rows."""
    M, N, L, s = biv.M, biv.N, biv.L, biv.s
    qp, q = cf.qp, cf.q
    P = cf.prime
    jl = np.arange(N) % L
    js = np.arange(N) % s
    wts = np.array(cf.weights, dtype=np.int64)
    ar, ai = _load_kernel(ud[0], ud[1], wts, jl, js, L, s, qp)
    ar, ai = _fft_inplace(ar, ai, qp, False, 0)
    ar, ai = _fft_inplace(ar, ai, qp, False, 1)
    br, bi = _load_kernel(vd[0], vd[1], wts, jl, js, L, s, qp)
    br, bi = _fft_inplace(br, bi, qp, False, 0)
    br, bi = _fft_inplace(br, bi, qp, False, 1)
    size = 1 << (clog2(s) + 1) if s > 1 else 1
    j = max(size.bit_length() - 1, 1)
    wr, wi = _twiddles(qp, j, False)
    iwr, iwi = _twiddles(qp, j, True)
    _ring_kernel(ar, ai, br, bi, wr, wi, iwr, iwi, _bitrev(size), pow(size, -1, P), qp)
    del br, bi
    ar, ai = _fft_inplace(ar, ai, qp, True, 0)
    ar, ai = _fft_inplace(ar, ai, qp, True, 1)
    scale = pow(M * L, -1, P)
    iw = np.array([w * scale % P for w in cf.inv_weights], dtype=np.int64)
    e = np.array(cf.e[:N], dtype=np.int64)
    outr, outi, peak = _unload_kernel(ar, ai, iw, jl, js, e, qp, q)
    if peak >= (1 << (2 * (-(-q // N)) + 2)) * M * N:
        raise ArithmeticError("lifted coefficient exceeds the convolution bound")
    return outr, outi


def _digits_array(values: Sequence[int], cf: CrandallFaginLayout):
    """(M, N) object array of the variable-base digits of each residue."""
    x = np.array([int(v) for v in values], dtype=object)
    cols = [(x >> cf.e[j]) & ((1 << (cf.e[j + 1] - cf.e[j])) - 1) for j in range(cf.N)]
    return np.stack(cols, axis=1)


def _cf_generic(u, v, biv: BivariateLayout, cf: CrandallFaginLayout) -> list[Gaussian]:
    """numpy pipeline with Python-int entries, for q' > 31."""
    M, N, L, s = biv.M, biv.N, biv.L, biv.s
    q, qp = cf.q, cf.qp
    P = cf.prime
    jl = np.arange(N) % L
    js = np.arange(N) % s
    wts = np.array(cf.weights, dtype=object)

    def load(poly):
        ar = np.zeros((M, L, s), dtype=object)
        ai = np.zeros((M, L, s), dtype=object)
        ar[:, jl, js] = _red(_digits_array([w[0] for w in poly], cf) * wts, qp)
        ai[:, jl, js] = _red(_digits_array([w[1] for w in poly], cf) * wts, qp)
        ar, ai = _fft_inplace(ar, ai, qp, False, 0)
        return _fft_inplace(ar, ai, qp, False, 1)

    ar, ai = load(u)
    br, bi = load(v)
    hr, hi = _ring_mul(ar, ai, br, bi, s, qp)
    hr, hi = _fft_inplace(np.array(hr, order="C"), np.array(hi, order="C"), qp, True, 0)
    hr, hi = _fft_inplace(hr, hi, qp, True, 1)
    hr, hi = _scale(hr, hi, pow(M * L, -1, P), qp)
    iw = np.array(cf.inv_weights, dtype=object)
    wr = _red(hr[:, jl, js] * iw, qp)
    wi = _red(hi[:, jl, js] * iw, qp)
    half = P // 2
    wr = np.where(wr > half, wr - P, wr)
    wi = np.where(wi > half, wi - P, wi)
    bound = (1 << (2 * (-(-q // N)) + 2)) * M * N
    if int(np.abs(wr).max()) >= bound or int(np.abs(wi).max()) >= bound:
        raise ArithmeticError("lifted coefficient exceeds the convolution bound")
    shifts = np.array([1 << x for x in cf.e[:N]], dtype=object)
    outr = (wr * shifts).sum(axis=1)
    outi = (wi * shifts).sum(axis=1)
    return [Gaussian(mod_mersenne(int(a), q), mod_mersenne(int(b), q)) for a, b in zip(outr, outi)]


def cf_cyclic_mul(u: Sequence, v: Sequence, layout) -> list[Gaussian]:
    """Exact product in (Z/(2^q-1)Z)[i][X]/(X^M - 1)."""
    biv, cf = layout
    if len(u) != biv.M or len(v) != biv.M:
        raise ValueError(f"operands must have {biv.M} coefficients")
    mq = (1 << cf.q) - 1
    for w in (*u, *v):
        if not (0 <= w[0] < mq and 0 <= w[1] < mq):
            raise ValueError("coefficients must be canonical residues")
    if not _fast_path(cf):
        return _cf_generic(u, v, biv, cf)
    nl = -(-cf.q // LIMB)
    e = np.array(cf.e, dtype=np.int64)

    def digits(poly):
        return (_digits_kernel(_limbs_of([w[0] for w in poly], nl), e, cf.N),
                _digits_kernel(_limbs_of([w[1] for w in poly], nl), e, cf.N))

    outr, outi = _cf_core(digits(u), digits(v), biv, cf)
    return [Gaussian(_int_of_limbs(a), _int_of_limbs(b)) for a, b in zip(outr, outi)]


def cyclic_mul_oracle(u: Sequence, v: Sequence, q: int) -> list[Gaussian]:
    """Schoolbook product in (Z/(2^q-1)Z)[i][X]/(X^M-1)."""
    M = len(u)
    out = []
    for i in range(M):
        sr = 0
        si = 0
        for j in range(M):
            a, b = u[j]
            c, d = v[(i - j) % M]
            sr += a * c - b * d
            si += a * d + b * c
        out.append(Gaussian(mod_mersenne(sr, q), mod_mersenne(si, q)))
    return out


# integers through the Mersenne path

@dataclass(frozen=True)
class MersennePlan:
    bits: int
    q: int
    M: int
    chunk_bits: int
    qp: int
    layout: tuple


def _qp_candidates(floor: int, cap: int):
    q = floor if lucas_lehmer(floor) else find_mersenne_prime(floor, cap)
    while True:
        yield q
        q = find_mersenne_prime(q, cap)


def mersenne_plan(bits: int, qp_floor: int = 31, cap: int = DEFAULT_SEARCH_CAP) -> MersennePlan:
    """Parameters for multiplying two ``bits``-bit integers.

    Starts from beta(8 bits) and moves q up until the zero-padded product's
    coefficients fit below 2^q - 1.
    """
    if bits < 1:
        raise ValueError("bits must be positive")
    _, q, M = beta(8 * bits)
    while True:
        M = big_m(q)
        m = -(-bits // max(1, M // 2))
        if M >= 2 and 2 * m + clog2(M // 2) <= q - 1:
            break
        q += 1
    for qp in _qp_candidates(qp_floor, cap):
        try:
            layout = cf_layout(q, qp, M)
        except ValueError:
            continue
        return MersennePlan(bits, q, M, m, qp, layout)
    raise SearchFailure("no Mersenne prime gives a feasible layout")


def mersenne_multiply(a: int, b: int, qp_floor: int = 31, cap: int = DEFAULT_SEARCH_CAP) -> int:
    """Exact product through one Crandall-Fagin cyclic multiplication."""
    if a < 0 or b < 0:
        raise ValueError("operands must be non-negative")
    if a == 0 or b == 0:
        return 0
    plan = mersenne_plan(max(a.bit_length(), b.bit_length()), qp_floor, cap)
    M, m = plan.M, plan.chunk_bits
    biv, cf = plan.layout
    if not _fast_path(cf):
        u = [Gaussian(x, 0) for x in unpack_digits(a, m, M)]
        v = [Gaussian(x, 0) for x in unpack_digits(b, m, M)]
        return overlap_add([w.re for w in cf_cyclic_mul(u, v, plan.layout)], m)
    e = np.array(cf.e, dtype=np.int64)
    zero = np.zeros((M, cf.N), np.int64)

    def digits(x):
        limbs = _limbs_of([x], -(-x.bit_length() // LIMB))[0]
        return _chunk_digits_kernel(limbs, m, M, e, cf.N), zero

    outr, _ = _cf_core(digits(a), digits(b), biv, cf)
    nout = -(-(m * M + cf.q) // LIMB) + 2
    return _int_of_limbs(_overlap_kernel(outr, m, nout))

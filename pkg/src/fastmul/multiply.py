"""Integer multiplication through fixed-point complex transforms.

Two engines share the transform machinery:

* the simple engine splits n-bit inputs into b-bit chunks, transforms both
  zero-padded chunk vectors, multiplies pointwise, transforms back and
  rounds every coefficient to the nearest integer;
* the cyclic engine multiplies in (Z/(2^n-1)Z)[i] for admissible n, keeping
  the forward transform of a fixed operand so that t products cost t+1
  forward and t inverse transforms.

Short transform levels convert to Gaussian cyclic integer products; those
are taken by the base multiplier, or recursively by the same engine while
the configured depth allows it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import partial

from .bigint import (Gaussian, gaussian_cyclic_mul, mod_mersenne, mul_base,
                     overlap_add, unpack_digits, KARATSUBA_THRESHOLD)
from .fixed import FixedVector, clog2, vec_mul
from .short_dft import BaseMultiplier, CyclicMultiplier, KroneckerPacking
from .transform import DftPlan, compose_execute, default_factors, make_plan


@dataclass(frozen=True)
class MultiplyConfig:
    fft_threshold_bits: int = 1 << 14
    short_exponent: int = 6
    min_chunk: int = 16
    chunk_bits: int | None = None
    recursion_depth: int = 1
    karatsuba_threshold: int | None = KARATSUBA_THRESHOLD
    extra_precision: int = 0
    shadow: bool = False
    mersenne_qp_floor: int = 31
    mersenne_search_cap: int = 4423
    # test hook: flip one mantissa bit before rounding
    inject_fault: bool = False

    def with_(self, **kw) -> "MultiplyConfig":
        return replace(self, **kw)


@dataclass
class Trace:
    """Counters and rounding margins gathered during a multiplication."""

    forward_transforms: int = 0
    inverse_transforms: int = 0
    preparations: int = 0
    roundings: int = 0
    eps_max: float = 0.0
    chain_ratio_max: float = 0.0
    shadow_violations: int = 0
    modes: set = field(default_factory=set)

    def record_margin(self, eps_obs: float, chain: float, shadow: float | None) -> None:
        self.roundings += 1
        self.eps_max = max(self.eps_max, eps_obs)
        self.chain_ratio_max = max(self.chain_ratio_max, eps_obs / chain)
        if shadow is not None and eps_obs > shadow:
            self.shadow_violations += 1


@dataclass(frozen=True)
class MultiplyPlan:
    n_bits: int
    base: bool
    mode: str = "simple"
    b: int = 0
    m: int = 0
    k: int = 0
    p: int = 0
    r: int = 0
    d: int = 0
    r_d: int = 0
    depth: int = 1

    @property
    def chain_exponent(self) -> int:
        """Exponent of the analytic rounding-margin bound."""
        extra = 6 if self.mode == "simple" else 8
        return 2 * self.b + 2 * self.k + clog2(self.k) - self.p + extra


def kappa(n: int) -> int:
    if n < 3:
        raise ValueError("admissible lengths start at 3")
    lg = clog2(n)
    return lg - clog2(lg * lg) + 1


def is_admissible(n: int) -> bool:
    return n >= 3 and n % (1 << kappa(n)) == 0


def alpha(n: int) -> int:
    """Smallest admissible length >= n."""
    t = 1 << kappa(n)
    return -(-n // t) * t


def choose_params(n_bits: int, config: MultiplyConfig | None = None, depth: int = 1) -> MultiplyPlan:
    """Simple-engine parameters for n-bit inputs."""
    cfg = config or MultiplyConfig()
    if n_bits < 1:
        raise ValueError("n_bits must be positive")
    if n_bits < cfg.fft_threshold_bits:
        return MultiplyPlan(n_bits, True, depth=depth)
    b = cfg.chunk_bits or max(clog2(n_bits), cfg.min_chunk)
    m = -(-n_bits // b)
    k = clog2(2 * m)
    p = 2 * b + 2 * k + clog2(k) + 8 + cfg.extra_precision
    r, d, r_d = _groups(k, cfg.short_exponent)
    return MultiplyPlan(n_bits, False, "simple", b, m, k, p, r, d, r_d, depth)


def cyclic_params(n: int, config: MultiplyConfig | None = None, depth: int = 1) -> MultiplyPlan:
    """Cyclic-engine parameters for an admissible length n."""
    cfg = config or MultiplyConfig()
    if not is_admissible(n):
        raise ValueError(f"{n} is not an admissible length")
    k = kappa(n)
    if n < cfg.fft_threshold_bits or k < 1:
        return MultiplyPlan(n, True, "cyclic", depth=depth)
    b = n >> k
    p = 2 * b + 2 * k + clog2(k) + 10 + cfg.extra_precision
    r, d, r_d = _groups(k, cfg.short_exponent)
    return MultiplyPlan(n, False, "cyclic", b, 1 << k, k, p, r, d, r_d, depth)


def _groups(k: int, r: int) -> tuple[int, int, int]:
    r = max(1, min(r, k))
    d = -(-k // r)
    return r, d, k - (d - 1) * r


def cyclic_packing(r: int, p: int) -> KroneckerPacking:
    """Slots for the cyclic engine: total length admissible and divisible by 2^r."""
    step = 1 << r
    x = ((2 * p + r + 6) << r)
    while True:
        c = alpha(x)
        if c % step == 0:
            return KroneckerPacking(c >> r, step, p)
        x = c + 1


class Engine:
    """Owns the plan caches for one configuration.

    Not safe for concurrent use; distinct engines are independent.
    """

    def __init__(self, config: MultiplyConfig | None = None):
        self.config = config or MultiplyConfig()
        self._plans: dict = {}

    def _base(self):
        return partial(mul_base, karatsuba_threshold=self.config.karatsuba_threshold)

    def _plan(self, mp: MultiplyPlan, inverse: bool) -> DftPlan:
        key = (mp.mode, mp.k, mp.p, mp.r, inverse)
        plan = self._plans.get(key)
        if plan is None:
            factors, kinds = default_factors(mp.k, mp.r)
            packing_for = cyclic_packing if mp.mode == "cyclic" else None
            plan = make_plan(mp.k, mp.p, factors, kinds, inverse, packing_for=packing_for)
            self._plans[key] = plan
        return plan

    # simple engine

    def int_multiply(self, a: int, b: int, trace: Trace | None = None, depth: int = 1) -> int:
        _check_nat(a)
        _check_nat(b)
        if a == 0 or b == 0:
            return 0
        mp = choose_params(max(a.bit_length(), b.bit_length()), self.config, depth)
        if mp.base:
            return self._base()(a, b)
        if trace is not None:
            trace.modes.add("simple")
        cb, k, p = mp.b, mp.k, mp.p
        n = 1 << k
        shift = p - cb
        ua = FixedVector([x << shift for x in unpack_digits(a, cb, n)], [0] * n, cb, p)
        ub = FixedVector([x << shift for x in unpack_digits(b, cb, n)], [0] * n, cb, p)
        if self.config.shadow:
            ua = replace(ua, rho=0.0)
            ub = replace(ub, rho=0.0)
        mult = BaseMultiplier(self._inner_mul(depth))
        fa, fb = compose_execute(self._plan(mp, False), [ua, ub], mult)
        h = compose_execute(self._plan(mp, True), vec_mul(fa, fb), mult)
        if trace is not None:
            trace.forward_transforms += 2
            trace.inverse_transforms += 1
            trace.preparations += mult.preparations
        e = 2 * cb + 2 * k
        h = h.with_exp(h.exp - k)
        coeffs, _ = self._round(h, e, mp, trace, real=True)
        return overlap_add(coeffs, cb)

    def _inner_mul(self, depth: int):
        if depth < self.config.recursion_depth:
            return lambda x, y: self.int_multiply(x, y, None, depth + 1)
        return self._base()

    def _round(self, h: FixedVector, e: int, mp: MultiplyPlan, trace: Trace | None, real: bool):
        """Round h (at exponent e) to Gaussian integers with margin 1/4."""
        s = h.prec - e
        half = 1 << (s - 1)
        if self.config.inject_fault:
            re = list(h.re)
            re[0] ^= half
            h = FixedVector(re, h.im, h.exp, h.prec, h.rho)
        limit = 1 << (2 * s - 4)
        worst = 0
        cr = [(x + half) >> s for x in h.re]
        if real:
            ci = None
            for x, c, y in zip(h.re, cr, h.im):
                dx = x - (c << s)
                d = dx * dx + y * y
                if d > worst:
                    worst = d
        else:
            ci = [(y + half) >> s for y in h.im]
            for x, c, y, g in zip(h.re, cr, h.im, ci):
                dx = x - (c << s)
                dy = y - (g << s)
                d = dx * dx + dy * dy
                if d > worst:
                    worst = d
        if worst > limit:
            raise ArithmeticError(
                f"rounding margin {math.sqrt(worst) / 2 ** s:.3g} exceeds 1/4 "
                f"(n={mp.n_bits}, b={mp.b}, k={mp.k}, p={mp.p})")
        if trace is not None:
            eps_obs = math.sqrt(worst) / 2.0 ** s
            shadow = None
            if h.rho is not None:
                shadow = math.ldexp(h.rho, e)
            trace.record_margin(eps_obs, 2.0 ** mp.chain_exponent, shadow)
        return cr, ci

    # cyclic engine

    def cyclic_mul_fixed(self, us, v, n: int, trace: Trace | None = None,
                         depth: int = 1) -> list[Gaussian]:
        """Products u*v in (Z/(2^n-1)Z)[i] for every u, sharing v's transform."""
        mp = cyclic_params(n, self.config, depth)
        us = [Gaussian(*u) for u in us]
        v = Gaussian(*v)
        m = (1 << n) - 1
        for w in (*us, v):
            if not (0 <= w.re < m and 0 <= w.im < m):
                raise ValueError("components must be canonical residues")
        if mp.base:
            base = self._base()
            return [gaussian_cyclic_mul(u, v, n, base) for u in us]
        if trace is not None:
            trace.modes.add("cyclic")
        ctx = _CyclicContext(self, mp, depth)
        vt = ctx.forward([v])[0]
        uts = ctx.forward(us)
        out = [ctx.finish(ut, vt, trace) for ut in uts]
        if trace is not None:
            trace.forward_transforms += len(us) + 1
            trace.inverse_transforms += len(us)
            trace.preparations += ctx.mult.preparations
        return out

    def int_multiply_via_cyclic(self, a: int, b: int, trace: Trace | None = None) -> int:
        _check_nat(a)
        _check_nat(b)
        if a == 0 or b == 0:
            return 0
        n = alpha(2 * max(a.bit_length(), b.bit_length()) + 1)
        return self.cyclic_mul_fixed([Gaussian(a, 0)], Gaussian(b, 0), n, trace)[0].re


class _CyclicContext:
    def __init__(self, engine: Engine, mp: MultiplyPlan, depth: int):
        self.engine = engine
        self.mp = mp
        self.fwd = engine._plan(mp, False)
        self.inv = engine._plan(mp, True)
        if depth < engine.config.recursion_depth:
            self.mult: CyclicMultiplier = FftMultiplier(engine, depth + 1)
        else:
            self.mult = BaseMultiplier(engine._base())

    def forward(self, ws) -> list[FixedVector]:
        mp = self.mp
        cb, p, n = mp.b, mp.p, mp.m
        shift = p - cb - 1
        vecs = []
        for w in ws:
            re = [x << shift for x in unpack_digits(w.re, cb, n)]
            im = [x << shift for x in unpack_digits(w.im, cb, n)]
            vecs.append(FixedVector(re, im, cb + 1, p, 0.0 if self.engine.config.shadow else None))
        return compose_execute(self.fwd, vecs, self.mult)

    def finish(self, ut: FixedVector, vt: FixedVector, trace: Trace | None) -> Gaussian:
        mp = self.mp
        h = compose_execute(self.inv, vec_mul(ut, vt), self.mult)
        e = 2 * (mp.b + 1) + 2 * mp.k
        h = h.with_exp(h.exp - mp.k)
        cr, ci = self.engine._round(h, e, mp, trace, real=False)
        return Gaussian(mod_mersenne(overlap_add(cr, mp.b), mp.n_bits),
                        mod_mersenne(overlap_add(ci, mp.b), mp.n_bits))


class FftMultiplier(CyclicMultiplier):
    """Cyclic products through the cyclic engine; the fixed operand is transformed once."""

    def __init__(self, engine: Engine, depth: int):
        super().__init__()
        self.engine = engine
        self.depth = depth

    def prepare(self, y: Gaussian, nbits: int):
        self.preparations += 1
        mp = cyclic_params(nbits, self.engine.config, self.depth)
        if mp.base:
            return nbits, None, y
        ctx = _CyclicContext(self.engine, mp, self.depth)
        return nbits, ctx, ctx.forward([y])[0]

    def multiply(self, x: Gaussian, prepared) -> Gaussian:
        self.preparations += 1
        nbits, ctx, yt = prepared
        if ctx is None:
            return gaussian_cyclic_mul(x, yt, nbits, self.engine._base())
        return ctx.finish(ctx.forward([x])[0], yt, None)


def _check_nat(x: int) -> None:
    if not isinstance(x, int) or x < 0:
        raise ValueError(f"operands must be non-negative ints, got {x!r}")


_default_engines: dict = {}


def _engine(config: MultiplyConfig | None) -> Engine:
    cfg = config or MultiplyConfig()
    eng = _default_engines.get(cfg)
    if eng is None:
        eng = _default_engines[cfg] = Engine(cfg)
    return eng


def int_multiply(a: int, b: int, config: MultiplyConfig | None = None,
                 trace: Trace | None = None) -> int:
    return _engine(config).int_multiply(a, b, trace)


def cyclic_mul_fixed(us, v, n: int, config: MultiplyConfig | None = None,
                     trace: Trace | None = None) -> list[Gaussian]:
    return _engine(config).cyclic_mul_fixed(us, v, n, trace)


def int_multiply_via_cyclic(a: int, b: int, config: MultiplyConfig | None = None,
                            trace: Trace | None = None) -> int:
    return _engine(config).int_multiply_via_cyclic(a, b, trace)

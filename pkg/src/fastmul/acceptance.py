"""Acceptance criteria as executable checks.

``AcceptanceRun`` evaluates the numbered criteria at a chosen ``Scale``
and a few per-suite sanity checks.  Every check returns a ``CheckResult``
whose ``line()`` is a single PASS/FAIL summary.  The rounding-margin
criterion reuses the traces gathered by the exact-multiplication run.
"""
from __future__ import annotations

import io
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import bench
from .bigint import (Gaussian, gaussian_cyclic_mul, mod_mersenne, mul_base, mul_karatsuba,
                     mul_schoolbook, pack_digits, unpack_digits)
from .fixed import (FixedComplex, FixedVector, clog2, eps, fp_add, fp_convolve_exact, fp_mul,
                    rho_add, rho_mul, tight_bound)
from .mersenne import (cf_cyclic_mul, cf_layout, cyclic_mul_oracle, element_order, join_digits,
                       layout_violation, lucas_lehmer, mersenne_multiply, root_2q1, split_digits)
from .multiply import (MultiplyConfig, Trace, alpha, cyclic_mul_fixed, int_multiply,
                       int_multiply_via_cyclic, is_admissible)
from .recurrence import (FOUR_LOG_SQUARED, LOG, exp3_log4, log_star, phi_star)
from .short_dft import (bluestein_tables, dft_short, direct_convolve, kronecker_cyclic_gaussian,
                        kronecker_packing)
from .transform import (BLUESTEIN, BUTTERFLY, certified_error, compose_execute, make_plan,
                        reference_dft, reference_dft_direct, reference_gap)


@dataclass(frozen=True)
class Scale:
    name: str = "full"
    pairs: int = 10_000
    adversarial: int = 500
    min_exp: int = 4
    max_exp: int = 20
    dft_trials: int = 100
    dft_max_k: int = 16
    short_trials: int = 100
    short_max_r: int = 10
    admissible_samples: int = 10_000
    cf_trials: int = 50
    recurrence_points: int = 1000
    bench_min_exp: int = 14
    bench_max_exp: int = 22
    bench_steps: int = 5
    chains: int = 10_000
    bigint_pairs: int = 300


FULL = Scale()
QUICK = Scale("quick", pairs=60, adversarial=60, max_exp=16, dft_trials=2, dft_max_k=10,
              short_trials=2, short_max_r=7, admissible_samples=300, cf_trials=1,
              recurrence_points=100, bench_max_exp=16, bench_steps=2, chains=300,
              bigint_pairs=40)


@dataclass
class CheckResult:
    label: str
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    metrics: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        name = f"criterion {self.label}" if self.label.isdigit() else self.label
        return f"[{status}] {name} {self.title}: {self.detail} ({self.seconds:.1f} s)"


SUITES: dict[str, tuple[str, ...]] = {
    "bigint_core": ("bigint",),
    "fixed_point": ("fixed",),
    "transform": ("2",),
    "short_dft": ("4",),
    "multiply": ("1", "3", "5", "6"),
    "mersenne": ("7", "8"),
    "recurrence": ("9",),
    "performance": ("10",),
}

CRITERIA = tuple(str(i) for i in range(1, 11))

TITLES = {
    "bigint": "base arithmetic", "fixed": "shadow bounds",
    "1": "exact multiplication", "2": "tight transform bound", "3": "rounding margin",
    "4": "Bluestein-Kronecker equivalence", "5": "admissible lengths",
    "6": "fixed-operand amortization", "7": "Crandall-Fagin exactness",
    "8": "Mersenne infrastructure", "9": "recurrence toolkit", "10": "performance smoke",
}


def _timed(fn):
    def wrapper(self, *args, **kw):
        start = time.perf_counter()
        res = fn(self, *args, **kw)
        res.seconds = time.perf_counter() - start
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def random_unit_vector(rng: random.Random, n: int, p: int) -> FixedVector:
    """Mantissas drawn uniformly from the unit disc."""
    one = 1 << p
    bound = one * one
    re: list[int] = []
    im: list[int] = []
    while len(re) < n:
        x = rng.randint(-one, one)
        y = rng.randint(-one, one)
        if x * x + y * y <= bound:
            re.append(x)
            im.append(y)
    return FixedVector(re, im, 0, p)


def log_uniform_bits(rng: random.Random, lo_exp: int, hi_exp: int) -> int:
    return max(1, int(2 ** rng.uniform(lo_exp, hi_exp)))


def _alternating(n: int) -> tuple[int, int]:
    mask = (1 << n) - 1
    return int("aa" * (n // 8 + 1), 16) & mask, int("55" * (n // 8 + 1), 16) & mask


def adversarial_pairs(rng: random.Random, count: int, lo_exp: int, hi_exp: int,
                      threshold: int) -> list[tuple[int, int, str]]:
    """All-ones, single-bit, threshold-straddling and other structured operands."""
    lo, hi = 1 << lo_exp, 1 << hi_exp
    edges = sorted({max(1, threshold + d) for d in (-1, 0, 1)}
                   | {(1 << e) + d for e in range(lo_exp, hi_exp) for d in (-1, 0, 1)}
                   | {hi})

    def size() -> int:
        return rng.choice(edges) if rng.random() < 0.5 else rng.randint(lo, hi)

    def ones(n: int) -> int:
        return (1 << n) - 1

    kinds: list[Callable[[], tuple[int, int]]] = [
        lambda: (ones(size()), ones(size())),
        lambda: (1 << (size() - 1), 1 << (size() - 1)),
        lambda: (1 << (size() - 1), ones(size())),
        lambda: (ones(n := size()), ones(n)),
        lambda: (ones(size()), rng.choice((0, 1, 2, 3))),
        lambda: (rng.getrandbits(size()) | 1, ones(rng.randint(1, 64))),
        lambda: ((1 << (size() - 1)) | 1, (1 << (size() - 1)) | 1),
        lambda: _alternating(size()),
        lambda: (ones(n := size()) ^ ((1 << (n // 2)) - 1), ones(n)),
        lambda: (rng.getrandbits(n := size()) | (1 << (n - 1)), ones(n)),
    ]
    names = ("all-ones", "single-bit", "single-bit x all-ones", "equal all-ones", "tiny",
             "unbalanced", "sparse", "alternating", "half-ones", "random x all-ones")
    out = []
    for i in range(count):
        j = i % len(kinds)
        a, b = kinds[j]()
        out.append((a, b, names[j]))
    return out


class AcceptanceRun:
    """Shared state for one pass over the criteria."""

    def __init__(self, scale: Scale = FULL, seed: int = 20240601,
                 config: MultiplyConfig | None = None, log: Callable[[str], None] | None = None):
        self.scale = scale
        self.seed = seed
        self.config = (config or MultiplyConfig()).with_(shadow=True)
        self.log = log or (lambda msg: None)
        self.traces: dict[str, Trace] | None = None
        self.results: dict[str, CheckResult] = {}

    def rng(self, tag: str) -> random.Random:
        return random.Random(f"{self.seed}:{tag}")

    def run(self, labels) -> list[CheckResult]:
        table = {
            "bigint": self.check_bigint, "fixed": self.check_fixed,
            "1": self.criterion_1, "2": self.criterion_2, "3": self.criterion_3,
            "4": self.criterion_4, "5": self.criterion_5, "6": self.criterion_6,
            "7": self.criterion_7, "8": self.criterion_8, "9": self.criterion_9,
            "10": self.criterion_10,
        }
        out = []
        for label in labels:
            if label not in self.results:
                try:
                    self.results[label] = table[label]()
                except Exception as exc:
                    self.results[label] = CheckResult(
                        _label(label), TITLES[label], False, f"raised {type(exc).__name__}: {exc}")
            out.append(self.results[label])
        return out

    # suite sanity checks

    @_timed
    def check_bigint(self) -> CheckResult:
        """Base multiplication against the built-in product, reductions, packing."""
        rng = self.rng("bigint")
        bad = []
        for i in range(self.scale.bigint_pairs):
            a = rng.getrandbits(rng.randint(1, 1 << 16))
            b = rng.getrandbits(rng.randint(1, 1 << 16))
            want = a * b
            if mul_base(a, b) != want or mul_base(b, a) != want:
                bad.append(f"karatsuba pair {i}")
            if i % 10 == 0 and mul_schoolbook(a, b) != want:
                bad.append(f"schoolbook pair {i}")
            small = rng.randrange(256)
            if mul_karatsuba(small, b, 1) != sum(b for _ in range(small)):
                bad.append(f"repeated addition {i}")
            q = rng.randint(2, 300)
            if mod_mersenne(want, q) != want % ((1 << q) - 1):
                bad.append(f"mod_mersenne {i}")
            x, y = a % ((1 << q) - 1), b % ((1 << q) - 1)
            if gaussian_cyclic_mul(Gaussian(x, 0), Gaussian(y, 0), q) != (mod_mersenne(x * y, q), 0):
                bad.append(f"gaussian embedding {i}")
            w = rng.randint(1, 80)
            digits = unpack_digits(a, w, -(-a.bit_length() // w) + 1)
            if pack_digits(digits, w) != a:
                bad.append(f"packing {i}")
        return CheckResult("bigint_core", "base arithmetic", not bad,
                           f"{self.scale.bigint_pairs} pairs, {len(bad)} failures"
                           + (f" (first: {bad[0]})" if bad else ""))

    @_timed
    def check_fixed(self) -> CheckResult:
        """Random add/multiply chains: true error never exceeds the shadow bound."""
        rng = self.rng("fixed")
        violations = 0
        worst = 0.0
        for _ in range(self.scale.chains):
            p = rng.choice((8, 16, 32, 53))
            depth = rng.randint(1, 64)
            z = random_unit_vector(rng, 1, p)[0]
            exact = z.value()
            e = 0
            rho = 0.0
            for _ in range(depth):
                u = random_unit_vector(rng, 1, p)[0]
                if rng.random() < 0.5:
                    z = fp_add(z, u)
                    uv = u.value(e)
                    exact = (exact[0] + uv[0], exact[1] + uv[1])
                    e += 1
                    # u sits at exponent e and is exact
                    rho = rho_add(rho, 0.0, p)
                else:
                    z = fp_mul(z, u)
                    uv = u.value()
                    exact = (exact[0] * uv[0] - exact[1] * uv[1],
                             exact[0] * uv[1] + exact[1] * uv[0])
                    rho = rho_mul(rho, 0.0, p)
            got = z.value(e)
            scale = Fraction(2) ** e
            err2 = ((got[0] - exact[0]) ** 2 + (got[1] - exact[1]) ** 2) / scale ** 2
            if err2 > Fraction(rho) ** 2:
                violations += 1
            if rho > 0:
                worst = max(worst, math.sqrt(float(err2)) / rho)
        return CheckResult("fixed_point", "shadow bounds", violations == 0,
                           f"{self.scale.chains} chains of depth <= 64, {violations} violations, "
                           f"worst error/bound {worst:.3f}", metrics={"ratio": worst})

    # numbered criteria

    def _multiply_cases(self):
        sc = self.scale
        rng = self.rng("pairs")
        for i in range(sc.pairs):
            n = log_uniform_bits(rng, sc.min_exp, sc.max_exp)
            yield rng.getrandbits(n) | (1 << (n - 1)), rng.getrandbits(n) | (1 << (n - 1)), "random"
        yield from adversarial_pairs(self.rng("adversarial"), sc.adversarial, sc.min_exp,
                                     sc.max_exp, self.config.fft_threshold_bits)

    @_timed
    def criterion_1(self) -> CheckResult:
        """Every algorithm equals mul_base on random and adversarial pairs."""
        cfg = self.config
        forced = cfg.with_(fft_threshold_bits=1)
        traces = {"simple": Trace(), "cyclic": Trace()}
        mismatches: list[str] = []
        count = 0
        for i, (a, b, kind) in enumerate(self._multiply_cases()):
            want = mul_base(a, b)
            bits = max(a.bit_length(), b.bit_length())
            # below the threshold the engines defer to mul_base; force the transforms too
            variants = [cfg] if bits >= cfg.fft_threshold_bits else [cfg, forced]
            for vc in variants:
                got = {
                    "simple": int_multiply(a, b, vc, traces["simple"]),
                    "cyclic": int_multiply_via_cyclic(a, b, vc, traces["cyclic"]),
                }
                for name, value in got.items():
                    if value != want:
                        mismatches.append(f"{name} on case {i} ({kind}, {bits} bits)")
            if mersenne_multiply(a, b, cfg.mersenne_qp_floor, cfg.mersenne_search_cap) != want:
                mismatches.append(f"mersenne on case {i} ({kind}, {bits} bits)")
            count += 1
            if count % 500 == 0:
                self.log(f"criterion 1: {count} cases checked")
        self.traces = traces
        detail = (f"{count} cases ({self.scale.pairs} random in [2^{self.scale.min_exp}, "
                  f"2^{self.scale.max_exp}] bits + {self.scale.adversarial} adversarial) x "
                  f"3 algorithms, {len(mismatches)} mismatches")
        if mismatches:
            detail += f"; first: {mismatches[0]}"
        return CheckResult("1", "exact multiplication", not mismatches, detail,
                           metrics={"cases": count, "mismatches": len(mismatches)})

    @_timed
    def criterion_2(self) -> CheckResult:
        """Composed transforms stay within (1+eps)^(3k-2) - 1 of the exact DFT."""
        sc = self.scale
        rng = self.rng("dft")
        violations = []
        worst = 0.0
        cross_bad = 0
        runs = 0
        for k in range(1, sc.dft_max_k + 1):
            for p in (32, 64):
                bound = tight_bound(k, p)
                for t in range(sc.dft_trials):
                    inverse = bool(t % 2)
                    plan = make_plan(k, p, inverse=inverse) if t % 4 < 2 else \
                        make_plan(k, p, *_random_factors(rng, k), inverse=inverse)
                    a = random_unit_vector(rng, 1 << k, p)
                    out = compose_execute(plan, a)
                    ref = reference_dft(a, inverse)
                    if k <= 8:
                        direct = reference_dft_direct(a, inverse)
                        if reference_gap(direct, ref) > direct.error_bound + ref.error_bound:
                            cross_bad += 1
                    err = certified_error(out, ref, a.exp)
                    runs += 1
                    worst = max(worst, float(err / bound))
                    if err > bound:
                        violations.append(f"k={k} p={p} factors={plan.factors}")
            self.log(f"criterion 2: k={k} done, worst error/bound {worst:.3f}")
        passed = not violations and cross_bad == 0
        detail = (f"{runs} transforms (k=1..{sc.dft_max_k}, p in {{32, 64}}), "
                  f"{len(violations)} violations, worst error/bound {worst:.3f}, "
                  f"{cross_bad} oracle disagreements")
        if violations:
            detail += f"; first: {violations[0]}"
        return CheckResult("2", "tight transform bound", passed, detail,
                           metrics={"worst_ratio": worst})

    @_timed
    def criterion_3(self) -> CheckResult:
        """Rounding margins from the criterion-1 runs."""
        if self.traces is None:
            self.run(["1"])
        if self.traces is None:
            return CheckResult("3", "rounding margin", False, "criterion 1 produced no traces")
        parts = []
        passed = True
        eps_max = 0.0
        for mode, tr in self.traces.items():
            ok = (tr.eps_max <= 0.25 and tr.chain_ratio_max <= 1.0
                  and tr.shadow_violations == 0 and tr.roundings > 0)
            passed &= ok
            eps_max = max(eps_max, tr.eps_max)
            parts.append(f"{mode}: {tr.roundings} roundings, eps_max {tr.eps_max:.3g}, "
                         f"eps/chain {tr.chain_ratio_max:.3g}, "
                         f"{tr.shadow_violations} shadow violations")
        return CheckResult("3", "rounding margin", passed, "; ".join(parts),
                           metrics={"eps_max": eps_max})

    @_timed
    def criterion_4(self) -> CheckResult:
        """Short transforms match the oracle and the direct convolution bit for bit."""
        sc = self.scale
        rng = self.rng("short")
        bound_bad = []
        conv_bad = []
        worst = 0.0
        for r in range(3, sc.short_max_r + 1):
            for t in range(sc.short_trials):
                p = 32 if t % 2 else 64
                inverse = t % 4 >= 2
                tables = bluestein_tables(r, p, inverse)
                a = random_unit_vector(rng, 1 << r, p)
                out = dft_short(a, tables)
                err = certified_error(out, reference_dft(a, inverse), a.exp)
                ratio = float(err / tight_bound(r, p))
                worst = max(worst, ratio)
                if ratio > 1:
                    bound_bad.append(f"r={r} p={p}")
                # convolution stage alone on a random unit-disc operand
                x = random_unit_vector(rng, 1 << r, p)
                hr, hi = kronecker_cyclic_gaussian((x.re, x.im), (tables.g.re, tables.g.im),
                                                   kronecker_packing(r, p))
                s = p + r
                kr = [h >> s if h >= 0 else -((-h) >> s) for h in hr]
                ki = [h >> s if h >= 0 else -((-h) >> s) for h in hi]
                ref = fp_convolve_exact(x, tables.g)
                if kr != list(ref.re) or ki != list(ref.im):
                    conv_bad.append(f"r={r} p={p}")
                if t < 4 and r <= 8:
                    via = dft_short(a, tables, convolve=direct_convolve(p, r))
                    if list(via.re) != list(out.re) or list(via.im) != list(out.im):
                        conv_bad.append(f"transform r={r} p={p}")
            self.log(f"criterion 4: r={r} done")
        passed = not bound_bad and not conv_bad
        detail = (f"r=3..{sc.short_max_r}, {sc.short_trials} trials each: {len(bound_bad)} bound "
                  f"violations (worst error/bound {worst:.3f}), {len(conv_bad)} convolution "
                  f"mismatches")
        return CheckResult("4", "Bluestein-Kronecker equivalence", passed, detail,
                           metrics={"worst_ratio": worst})

    @_timed
    def criterion_5(self) -> CheckResult:
        """alpha(n) is the smallest admissible length >= n and is close to n."""
        rng = self.rng("admissible")
        bad = []
        for _ in range(self.scale.admissible_samples):
            n = rng.randint(3, 10 ** 7)
            a = alpha(n)
            lg = clog2(n)
            if not is_admissible(a):
                bad.append(f"alpha({n}) = {a} not admissible")
            elif a != brute_force_alpha(n):
                bad.append(f"alpha({n}) = {a} differs from the scan")
            elif not (n <= a and a * lg * lg <= n * lg * lg + 4 * n):
                bad.append(f"alpha({n}) = {a} outside [n, n + 4n/lg^2 n]")
        detail = f"{self.scale.admissible_samples} samples in [3, 10^7], {len(bad)} failures"
        if bad:
            detail += f"; first: {bad[0]}"
        return CheckResult("5", "admissible lengths", not bad, detail)

    @_timed
    def criterion_6(self) -> CheckResult:
        """A batch of t products costs t+1 forward and t inverse transforms."""
        rng = self.rng("amortize")
        n = alpha(1 << 15)
        mod = (1 << n) - 1
        parts = []
        passed = True
        for t in (1, 2, 5, 16):
            v = Gaussian(rng.randrange(mod), rng.randrange(mod))
            us = [Gaussian(rng.randrange(mod), rng.randrange(mod)) for _ in range(t)]
            tr = Trace()
            got = cyclic_mul_fixed(us, v, n, self.config, tr)
            exact = all(g == gaussian_cyclic_mul(u, v, n) for g, u in zip(got, us))
            ok = exact and tr.forward_transforms == t + 1 and tr.inverse_transforms == t
            passed &= ok
            parts.append(f"t={t}: {tr.forward_transforms} fwd/{tr.inverse_transforms} inv"
                         + ("" if exact else " (wrong product)"))
        return CheckResult("6", "fixed-operand amortization", passed,
                           f"n={n}; " + ", ".join(parts))

    @_timed
    def criterion_7(self) -> CheckResult:
        """Crandall-Fagin products over the layout grid equal the schoolbook ones."""
        rng = self.rng("cf")
        layouts = 0
        trials = 0
        bad = []
        for q in (31, 61, 89, 127):
            mq = (1 << q) - 1
            for qp in (13, 17, 19, 31):
                for M in (1, 2, 4, 8):
                    for N in range(1, q + 1):
                        if layout_violation(q, qp, M, N) is not None:
                            continue
                        try:
                            lay = cf_layout(q, qp, M, N)
                        except ValueError as exc:
                            bad.append(f"layout q={q} q'={qp} M={M} N={N}: {exc}")
                            continue
                        layouts += 1
                        msg = layout_invariant_violation(lay, rng)
                        if msg:
                            bad.append(f"q={q} q'={qp} M={M} N={N}: {msg}")
                        for _ in range(self.scale.cf_trials):
                            u = _random_poly(rng, M, mq)
                            v = _random_poly(rng, M, mq)
                            trials += 1
                            if cf_cyclic_mul(u, v, lay) != cyclic_mul_oracle(u, v, q):
                                bad.append(f"product q={q} q'={qp} M={M} N={N}")
            self.log(f"criterion 7: q={q} done")
        detail = f"{layouts} layouts, {trials} products, {len(bad)} failures"
        if bad:
            detail += f"; first: {bad[0]}"
        return CheckResult("7", "Crandall-Fagin exactness", not bad, detail)

    @_timed
    def criterion_8(self) -> CheckResult:
        """Lucas-Lehmer against factorizations; orders of the power-of-two roots."""
        import sympy
        bad = []
        primes = []
        for q in range(2, 131):
            # prime iff the factorization is the number itself
            f = sympy.factorint((1 << q) - 1)
            oracle = f == {(1 << q) - 1: 1}
            if lucas_lehmer(q) != oracle:
                bad.append(f"q={q}")
            if oracle:
                primes.append(q)
        orders = []
        for q in (3, 5, 7, 13, 17):
            order = element_order(root_2q1(q), (1 << q) - 1, q + 1)
            orders.append(order)
            if order != 1 << (q + 1):
                bad.append(f"root order for q={q} is {order}")
        detail = (f"q=2..130: {len(bad)} disagreements, prime exponents {primes}; "
                  f"root orders {orders}")
        return CheckResult("8", "Mersenne infrastructure", not bad, detail)

    @_timed
    def criterion_9(self) -> CheckResult:
        """Iterator identity and the log* comparison for 4 log^2."""
        rng = self.rng("recurrence")
        npts = self.scale.recurrence_points
        cases = [(LOG, 1.0, 1e300), (FOUR_LOG_SQUARED, 100.0, 1e300), (exp3_log4(), 16.0, 1e300)]
        bad = []
        for phi, sigma, top in cases:
            for _ in range(npts):
                x = math.exp(rng.uniform(math.log(sigma), math.log(top)))
                if x <= sigma:
                    continue
                lhs = phi_star(phi, sigma, x)
                rhs = phi_star(phi, sigma, phi(x)) + 1
                if lhs != rhs:
                    bad.append(f"{phi.name} at x={x:.6g}: {lhs} != {rhs}")
        worst = 0
        for _ in range(npts):
            x = math.exp(rng.uniform(0.0, math.log(1e8)))
            worst = max(worst, abs(phi_star(FOUR_LOG_SQUARED, 100.0, x) - log_star(x)))
        for x in (1.0, 100.0, 101.0, 1e8):
            worst = max(worst, abs(phi_star(FOUR_LOG_SQUARED, 100.0, x) - log_star(x)))
        passed = not bad and worst <= 6
        detail = (f"identity on {len(cases)} x {npts} points: {len(bad)} failures; "
                  f"max |phi* - log*| = {worst} for 4 log^2 x (sigma 100) on x <= 1e8")
        if bad:
            detail += f"; first: {bad[0]}"
        return CheckResult("9", "recurrence toolkit", passed, detail,
                           metrics={"max_gap": worst})

    @_timed
    def criterion_10(self) -> CheckResult:
        """int_multiply against schoolbook at 2^18 bits, and a verified bench CSV."""
        rng = self.rng("perf")
        n = 1 << 18
        a = rng.getrandbits(n) | (1 << (n - 1))
        b = rng.getrandbits(n) | (1 << (n - 1))
        cfg = MultiplyConfig()
        t_fft, got = _best_of(3, lambda: int_multiply(a, b, cfg))
        t_school, want = _best_of(3, lambda: mul_base(a, b, None))
        ratio = t_school / t_fft
        sc = self.scale
        sizes = bench.geometric_sizes(1 << sc.bench_min_exp, 1 << sc.bench_max_exp, sc.bench_steps)
        buf = io.StringIO()
        try:
            records = bench.run_bench(sizes, config=cfg, seed=self.seed)
            bench.write_csv(records, buf)
            rows_ok = bool(records) and all(r.verified for r in records)
            bench_note = f"bench CSV {len(records)} rows over 2^{sc.bench_min_exp}..2^{sc.bench_max_exp}"
        except bench.VerificationError as exc:
            rows_ok = False
            bench_note = f"bench aborted: {exc}"
        self.bench_csv = buf.getvalue()
        passed = got == want and ratio >= 2 and rows_ok
        detail = (f"2^18 bits: int_multiply {t_fft:.3f} s, schoolbook {t_school:.3f} s, "
                  f"speed-up {ratio:.2f} (need >= 2); {bench_note}, all verified: {rows_ok}")
        return CheckResult("10", "performance smoke", passed, detail,
                           metrics={"ratio": ratio, "t_fft": t_fft, "t_school": t_school})


def _label(label: str) -> str:
    for suite, labels in SUITES.items():
        if label in labels and not label.isdigit():
            return suite
    return label


def _best_of(reps: int, fn):
    best = math.inf
    value = None
    for _ in range(reps):
        start = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - start)
    return best, value


def _random_factors(rng: random.Random, k: int) -> tuple[list[int], list[str]]:
    factors = []
    left = k
    while left:
        r = rng.randint(1, left)
        factors.append(r)
        left -= r
    kinds = [BLUESTEIN if r >= 3 and rng.random() < 0.7 else BUTTERFLY for r in factors]
    return factors, kinds


def _random_poly(rng: random.Random, M: int, mq: int) -> list[Gaussian]:
    special = (0, 1, mq - 1)
    out = []
    for _ in range(M):
        if rng.random() < 0.1:
            out.append(Gaussian(rng.choice(special), rng.choice(special)))
        else:
            out.append(Gaussian(rng.randrange(mq), rng.randrange(mq)))
    return out


def layout_invariant_violation(layout, rng: random.Random) -> str | None:
    """First failed layout invariant, or None."""
    biv, cf = layout
    P = cf.prime
    q, N = cf.q, cf.N
    if pow(cf.theta, N, P) != 2:
        return "theta^N != 2"
    if biv.L * biv.s != N or biv.L & (biv.L - 1) or biv.s % 2 == 0:
        return "N != L s with L a power of two and s odd"
    lo = q // N
    for i in range(N):
        delta = cf.e[i + 1] - cf.e[i] - lo
        if delta not in (0, 1):
            return f"digit {i} width offset {delta}"
        if not 0 <= cf.c[i] < N:
            return f"weight exponent c_{i} = {cf.c[i]}"
        if cf.weights[i] * cf.inv_weights[i] % P != 1:
            return f"weight {i} is not inverted"
        if cf.weights[i] != pow(cf.theta, cf.c[i], P):
            return f"weight {i} is not theta^c_{i}"
    if cf.e[0] != 0 or cf.e[N] != q:
        return "digit positions do not span q bits"
    mq = (1 << q) - 1
    for x in (0, 1, mq - 1, rng.randrange(mq)):
        ds = split_digits(x, cf)
        if join_digits(ds, cf) != x:
            return f"digits of {x} do not recombine"
        for i, d in enumerate(ds):
            if not 0 <= d < 1 << (cf.e[i + 1] - cf.e[i]):
                return f"digit {i} of {x} out of range"
    return None


def brute_force_alpha(n: int) -> int:
    """Smallest admissible m >= n by scanning candidates in blocks."""
    width = 1024
    start = n
    while True:
        m = np.arange(start, start + width, dtype=np.int64)
        hits = np.flatnonzero(_admissible_mask(m))
        if hits.size:
            return int(m[hits[0]])
        start += width
        width *= 2


def _admissible_mask(m: np.ndarray) -> np.ndarray:
    # bit_length(m - 1) via frexp is exact below 2^53
    _, lg = np.frexp((m - 1).astype(np.float64))
    lg = lg.astype(np.int64)
    table = np.array([clog2(x * x) if x else 0 for x in range(64)], dtype=np.int64)
    kap = lg - table[lg] + 1
    return (m >= 3) & (m % (np.int64(1) << kap) == 0)


def run_labels(labels, scale: Scale = FULL, seed: int = 20240601,
               config: MultiplyConfig | None = None, log=None) -> list[CheckResult]:
    return AcceptanceRun(scale, seed, config, log).run(labels)


def labels_for(suites) -> list[str]:
    out: list[str] = []
    for s in suites:
        if s not in SUITES:
            raise ValueError(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
        out += [x for x in SUITES[s] if x not in out]
    return out

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fastmul.fixed import FixedVector, root_table, tight_bound
from fastmul.transform import (BLUESTEIN, BUTTERFLY, certified_error, compose_execute,
                               default_factors, dft_direct, dft_exact, directed_roots, fft_pow2,
                               make_plan, max_relative_error, plan_rho, reference_dft,
                               reference_dft_direct, reference_distance, reference_gap,
                               reference_roots)


def unit_vector(seed, n, p):
    rng = random.Random(seed)
    one = 1 << p
    re, im = [], []
    while len(re) < n:
        x, y = rng.randint(-one, one), rng.randint(-one, one)
        if x * x + y * y <= one * one:
            re.append(x)
            im.append(y)
    return FixedVector(re, im, 0, p)


@st.composite
def factorization(draw, k):
    parts = []
    left = k
    while left:
        r = draw(st.integers(1, left))
        parts.append(r)
        left -= r
    kinds = [draw(st.sampled_from([BUTTERFLY, BLUESTEIN])) if r >= 3 else BUTTERFLY
             for r in parts]
    return parts, kinds


def test_reference_oracles_agree():
    for k in range(1, 8):
        a = unit_vector(k, 1 << k, 40)
        for inverse in (False, True):
            fast = reference_dft(a, inverse)
            slow = reference_dft_direct(a, inverse)
            assert reference_gap(fast, slow) <= fast.error_bound + slow.error_bound


def test_reference_against_exact_rationals():
    # roots of order 4 are exact, so the rational DFT is available directly
    a = unit_vector(3, 4, 20)
    exact_roots = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    vals = [(Fraction(x, 1 << 20), Fraction(y, 1 << 20)) for x, y in zip(a.re, a.im)]
    exact = dft_exact(vals, exact_roots)
    ref = reference_dft(a)
    for (x, y), u, v in zip(exact, ref.re, ref.im):
        assert Fraction(u, 1 << ref.bits) == x
        assert Fraction(v, 1 << ref.bits) == y


def test_reference_roots():
    re, im = reference_roots(3, 30)
    assert re[0] == 1 << 30 and im[2] == 1 << 30
    re2, im2 = reference_roots(3, 30, True)
    assert re2 == re and im2 == tuple(-x for x in im)


@given(st.integers(1, 9), st.sampled_from([16, 32, 64]), st.booleans(), st.integers(0, 10 ** 6))
def test_default_plan_is_tight(k, p, inverse, seed):
    a = unit_vector(seed, 1 << k, p)
    out = compose_execute(make_plan(k, p, inverse=inverse), a)
    assert out.exp == k
    out.check()
    assert certified_error(out, reference_dft(a, inverse), 0) <= tight_bound(k, p)


@given(st.data(), st.integers(1, 9), st.integers(0, 10 ** 6))
def test_any_factorization_is_tight(data, k, seed):
    p = 32
    factors, kinds = data.draw(factorization(k))
    plan = make_plan(k, p, factors, kinds)
    a = unit_vector(seed, 1 << k, p)
    out = compose_execute(plan, a)
    assert certified_error(out, reference_dft(a), 0) <= tight_bound(k, p)


@pytest.mark.parametrize("k", [1, 2, 4, 6])
def test_butterflies_match_plan(k):
    a = unit_vector(k, 1 << k, 24)
    assert fft_pow2(a).re == compose_execute(make_plan(k, 24, [k], [BUTTERFLY]), a).re


def test_dft_direct_single_rounding():
    a = unit_vector(11, 16, 30)
    out = dft_direct(a, root_table(4, 30))
    assert out.exp == 4
    assert certified_error(out, reference_dft(a), 0) <= tight_bound(4, 30)
    assert max_relative_error(out, [(Fraction(u, 1 << 94), Fraction(v, 1 << 94))
                                    for u, v in zip(reference_dft(a).re, reference_dft(a).im)]) \
        < Fraction(1, 1 << 26)


def test_inverse_roundtrip():
    k, p = 7, 48
    a = unit_vector(5, 1 << k, p)
    f = compose_execute(make_plan(k, p), a)
    g = compose_execute(make_plan(k, p, inverse=True), f)
    # inverse(forward(a)) = n a, stored at exponent 2k, so a = g 2^k up to rounding
    assert g.exp == 2 * k
    tol = (1 << k) * 12 * k
    for x, y, u, v in zip(a.re, a.im, g.re, g.im):
        assert abs(x - (u << k)) <= tol and abs(y - (v << k)) <= tol


def test_batch_equals_single():
    plan = make_plan(8, 32, [3, 5], [BLUESTEIN, BLUESTEIN])
    vs = [unit_vector(s, 256, 32) for s in range(3)]
    batch = compose_execute(plan, vs)
    for v, w in zip(vs, batch):
        assert compose_execute(plan, v).re == w.re


def test_plan_rho_bounds_measured_error():
    plan = make_plan(8, 32)
    a = unit_vector(1, 256, 32)
    out = compose_execute(plan, FixedVector(a.re, a.im, 0, 32, 0.0))
    assert out.rho == plan_rho(plan, 0.0)
    assert certified_error(out, reference_dft(a), 0) <= Fraction(out.rho)


def test_default_factors():
    assert default_factors(13, 6) == ([6, 6, 1], [BLUESTEIN, BLUESTEIN, BUTTERFLY])
    assert default_factors(4, 6) == ([4], [BUTTERFLY])


def test_plan_validation():
    with pytest.raises(ValueError):
        make_plan(0, 32)
    with pytest.raises(ValueError):
        make_plan(5, 32, [2, 2])
    with pytest.raises(ValueError):
        make_plan(4, 32, [2, 2], [BLUESTEIN, BUTTERFLY])
    with pytest.raises(ValueError):
        compose_execute(make_plan(3, 32), unit_vector(0, 4, 32))
    with pytest.raises(ValueError):
        compose_execute(make_plan(2, 32), unit_vector(0, 4, 16))


def test_directed_roots_conjugate():
    f = directed_roots(4, 20, False)
    b = directed_roots(4, 20, True)
    assert f.re == b.re and all(x == -y for x, y in zip(f.im, b.im))


def test_reference_distance_units():
    a = unit_vector(2, 8, 32)
    ref = reference_dft(a)
    exact_copy = FixedVector([u >> (ref.bits - 32) for u in ref.re],
                             [v >> (ref.bits - 32) for v in ref.im], 3 + 0, 32 + 3)
    assert reference_distance(exact_copy, ref, 0) < Fraction(1, 1 << 30)

import random

import pytest
from hypothesis import given, strategies as st

from fastmul.bigint import mul_base
from fastmul.fixed import FixedVector, fp_convolve_exact, tight_bound
from fastmul.short_dft import (BaseMultiplier, bluestein_tables, dft_short, dft_short_fixed,
                               direct_convolve, kronecker_cyclic_gaussian, kronecker_packing,
                               min_chunk_bits, prepare_operand, kronecker_multiply)
from fastmul.transform import certified_error, reference_dft


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


def cyclic(f, g):
    n = len(f[0])
    out_r, out_i = [], []
    for i in range(n):
        out_r.append(sum(f[0][j] * g[0][i - j] - f[1][j] * g[1][i - j] for j in range(n)))
        out_i.append(sum(f[0][j] * g[1][i - j] + f[1][j] * g[0][i - j] for j in range(n)))
    return out_r, out_i


@st.composite
def gaussian_polys(draw):
    r = draw(st.integers(0, 6))
    p = draw(st.integers(4, 40))
    n = 1 << r
    bound = 1 << p
    coef = st.integers(-bound, bound)
    f = (draw(st.lists(coef, min_size=n, max_size=n)), draw(st.lists(coef, min_size=n, max_size=n)))
    g = (draw(st.lists(coef, min_size=n, max_size=n)), draw(st.lists(coef, min_size=n, max_size=n)))
    return r, p, f, g


@given(gaussian_polys())
def test_kronecker_is_exact(case):
    r, p, f, g = case
    got = kronecker_cyclic_gaussian(f, g, kronecker_packing(r, p))
    assert [list(x) for x in got] == [list(x) for x in cyclic(f, g)]


@given(gaussian_polys())
def test_kronecker_extremes(case):
    r, p, _, _ = case
    n = 1 << r
    b = 1 << p
    for f, g in [(([b] * n, [b] * n), ([b] * n, [b] * n)),
                 (([-b] * n, [-b] * n), ([b] * n, [-b] * n)),
                 (([-b] * n, [b] * n), ([-b] * n, [b] * n))]:
        got = kronecker_cyclic_gaussian(f, g, kronecker_packing(r, p))
        assert [list(x) for x in got] == [list(x) for x in cyclic(f, g)]


def test_kronecker_injected_multiplier_and_prepare_once():
    calls = []

    def counting(a, b):
        calls.append(1)
        return mul_base(a, b)

    mult = BaseMultiplier(counting)
    pk = kronecker_packing(3, 20)
    g = unit_vector(1, 8, 20)
    prepared = prepare_operand(g.re, g.im, pk, mult)
    for s in range(4):
        f = unit_vector(s + 2, 8, 20)
        assert kronecker_multiply(f.re, f.im, prepared, mult) == cyclic((f.re, f.im), (g.re, g.im))
    assert len(calls) == 12
    assert mult.preparations == 5


def test_packing_limits():
    assert min_chunk_bits(4, 30) == 70
    with pytest.raises(ValueError):
        kronecker_packing(4, 30, 69)
    pk = kronecker_packing(2, 8)
    with pytest.raises(ValueError):
        kronecker_cyclic_gaussian(([1 << 9] * 4, [0] * 4), ([0] * 4, [0] * 4), pk)


@pytest.mark.parametrize("r", [3, 4, 5, 6, 7])
@pytest.mark.parametrize("p", [32, 64])
@pytest.mark.parametrize("inverse", [False, True])
def test_dft_short_tight_and_matches_direct(r, p, inverse):
    tables = bluestein_tables(r, p, inverse)
    a = unit_vector(r * 1000 + p, 1 << r, p)
    out = dft_short(a, tables)
    assert out.exp == r
    out.check()
    assert certified_error(out, reference_dft(a, inverse), 0) <= tight_bound(r, p)
    via = dft_short(a, tables, convolve=direct_convolve(p, r))
    assert list(via.re) == list(out.re) and list(via.im) == list(out.im)


@given(st.integers(3, 6), st.sampled_from([24, 32, 64]), st.integers(0, 10 ** 6))
def test_convolution_stage_matches_exact_semantics(r, p, seed):
    tables = bluestein_tables(r, p)
    x = unit_vector(seed, 1 << r, p)
    hr, hi = kronecker_cyclic_gaussian((x.re, x.im), (tables.g.re, tables.g.im),
                                       kronecker_packing(r, p))
    s = p + r
    ref = fp_convolve_exact(x, tables.g)
    assert [h >> s if h >= 0 else -((-h) >> s) for h in hr] == list(ref.re)
    assert [h >> s if h >= 0 else -((-h) >> s) for h in hi] == list(ref.im)


def test_batch_shares_chirp_preparation():
    tables = bluestein_tables(4, 32)
    batch = [unit_vector(s, 16, 32) for s in range(5)]
    mult = BaseMultiplier()
    outs = dft_short_fixed(batch, tables, multiplier=mult)
    assert mult.preparations == 1 + len(batch)
    for a, o in zip(batch, outs):
        assert list(dft_short(a, tables).re) == list(o.re)


def test_dft_short_rejects_bad_input():
    tables = bluestein_tables(3, 32)
    with pytest.raises(ValueError):
        dft_short(unit_vector(0, 16, 32), tables)
    with pytest.raises(ValueError):
        dft_short(unit_vector(0, 8, 16), tables)
    with pytest.raises(ValueError):
        dft_short(unit_vector(0, 4, 32), bluestein_tables(2, 32))
    with pytest.raises(ValueError):
        bluestein_tables(0, 32)

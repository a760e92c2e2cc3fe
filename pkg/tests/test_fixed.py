import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from fastmul.fixed import (FixedComplex, FixedVector, clog2, eps, fp_add, fp_convolve_exact,
                           fp_mul, fp_sqrt, fp_sub, rho_mul, root_table, round_toward_zero,
                           tight_bound, tz_shift, vec_mul)

precisions = st.sampled_from([8, 16, 32, 53, 64, 100])


@st.composite
def unit(draw, p=None):
    p = draw(precisions) if p is None else p
    one = 1 << p
    x = draw(st.integers(-one, one))
    lim = math.isqrt(one * one - x * x)
    y = draw(st.integers(-lim, lim))
    return FixedComplex(x, y, p)


@st.composite
def unit_pair(draw):
    p = draw(precisions)
    return draw(unit(p)), draw(unit(p))


def dist(z, e, exact):
    v = z.value(e)
    return math.sqrt(float((v[0] - exact[0]) ** 2 + (v[1] - exact[1]) ** 2))


def test_eps_and_clog2():
    assert eps(10) == 2.0 ** -9
    assert [clog2(n) for n in (1, 2, 3, 4, 5, 1024, 1025)] == [0, 1, 2, 2, 3, 10, 11]
    with pytest.raises(ValueError):
        clog2(0)


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(0, 20))
def test_tz_shift(x, s):
    assert tz_shift(x, s) == int(Fraction(x, 1 << s))


@given(st.integers(-400, 400), st.integers(-400, 400))
def test_round_toward_zero_half_grid(a, b):
    z = (Fraction(a, 2), Fraction(b, 2))
    g = round_toward_zero(z)
    assert (g.re - z[0]) ** 2 + (g.im - z[1]) ** 2 <= 2
    assert g.re ** 2 + g.im ** 2 <= z[0] ** 2 + z[1] ** 2


def test_round_toward_zero_types():
    assert round_toward_zero(-2.7) == -2
    assert round_toward_zero(complex(1.5, -1.5)) == (1, -1)
    with pytest.raises(TypeError):
        round_toward_zero("x")


def test_disc_enforced():
    with pytest.raises(ValueError):
        FixedComplex(1 << 8, 1, 8)
    with pytest.raises(ValueError):
        FixedComplex(0, 0, 2)
    FixedComplex(-(1 << 8), 0, 8)


@given(unit_pair())
def test_add_sub_error(zu):
    z, u = zu
    p = z.prec
    zv, uv = z.value(), u.value()
    s = fp_add(z, u)
    assert dist(s, 1, (zv[0] + uv[0], zv[1] + uv[1])) / 2 <= eps(p)
    d = fp_sub(z, u)
    assert dist(d, 1, (zv[0] - uv[0], zv[1] - uv[1])) / 2 <= eps(p)


@given(unit_pair())
def test_mul_error(zu):
    z, u = zu
    zv, uv = z.value(), u.value()
    exact = (zv[0] * uv[0] - zv[1] * uv[1], zv[0] * uv[1] + zv[1] * uv[0])
    assert dist(fp_mul(z, u), 0, exact) <= eps(z.prec)


def test_mixed_precision_rejected():
    with pytest.raises(ValueError):
        fp_mul(FixedComplex.one(8), FixedComplex.one(9))
    with pytest.raises(ValueError):
        vec_mul(FixedVector.zeros(2, 8), FixedVector.zeros(2, 9))


@given(unit())
def test_sqrt(z):
    assume(z.im >= 0)
    s = fp_sqrt(z)
    assert s.im >= 0
    exact = complex(z) ** 0.5
    if z.prec <= 53:
        got = complex(s)
        assert abs(got - exact) <= eps(z.prec) + 1e-15


def test_sqrt_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        fp_sqrt(FixedComplex(0, -5, 8))


@pytest.mark.parametrize("k,p", [(2, 8), (5, 16), (8, 32), (10, 64), (6, 100)])
def test_root_table(k, p):
    t = root_table(k, p)
    n = 1 << k
    e = eps(p)
    with mpmath.workprec(p + 40):
        for i in range(n):
            w = mpmath.expjpi(mpmath.mpf(2 * i) / n)
            d = abs(mpmath.mpc(t.re[i], t.im[i]) / 2 ** p - w)
            assert d <= e
    for i in range(1, n):
        # conjugate symmetry
        dr = t.re[n - i] - t.re[i]
        di = t.im[n - i] + t.im[i]
        assert math.hypot(dr, di) <= 2 * e * 2 ** p
    fe = Fraction(e)
    bound = float((1 + fe) ** 3 - 1 + fe)
    step = max(1, n // 16)
    for i in range(0, n, step):
        for j in range(0, n, step):
            prod = fp_mul(t[i], t[j])
            w = t[(i + j) % n]
            assert math.hypot(prod.re - w.re, prod.im - w.im) <= bound * 2 ** p


def test_root_table_exact_points():
    t = root_table(4, 20)
    one = 1 << 20
    assert (t.re[0], t.im[0]) == (one, 0)
    assert (t.re[4], t.im[4]) == (0, one)
    assert (t.re[8], t.im[8]) == (-one, 0)
    with pytest.raises(ValueError):
        root_table(10, 8)


def test_tight_bound():
    assert tight_bound(1, 10) == Fraction(1, 512)
    assert tight_bound(2, 4) == Fraction(9, 8) ** 4 - 1


@given(st.integers(1, 5), st.data())
def test_convolve_exact_single_rounding(k, data):
    p = data.draw(precisions)
    n = 1 << k
    z = [data.draw(unit(p)) for _ in range(n)]
    u = [data.draw(unit(p)) for _ in range(n)]
    zv = FixedVector.from_elements(z, 1)
    uv = FixedVector.from_elements(u, 2)
    out = fp_convolve_exact(zv, uv)
    assert out.exp == 3 + k
    for i in range(n):
        sr = sum(z[j].re * u[(i - j) % n].re - z[j].im * u[(i - j) % n].im for j in range(n))
        si = sum(z[j].re * u[(i - j) % n].im + z[j].im * u[(i - j) % n].re for j in range(n))
        assert out.re[i] == tz_shift(sr, p + k)
        assert out.im[i] == tz_shift(si, p + k)
    out.check()


@given(precisions, st.data())
def test_vec_mul_shadow(p, data):
    n = data.draw(st.integers(1, 8))
    pairs = [(data.draw(unit(p)), data.draw(unit(p))) for _ in range(n)]
    a = FixedVector.from_elements([x for x, _ in pairs], 0, 0.0)
    b = FixedVector.from_elements([y for _, y in pairs], 0, 0.0)
    c = vec_mul(a, b)
    assert c.rho == rho_mul(0.0, 0.0, p)
    for i, (x, y) in enumerate(pairs):
        xv, yv = x.value(), y.value()
        exact = (xv[0] * yv[0] - xv[1] * yv[1], xv[0] * yv[1] + xv[1] * yv[0])
        assert dist(c[i], 0, exact) <= c.rho


def test_vector_helpers():
    v = FixedVector([1, 2], [3, 4], 1, 8)
    assert len(v) == 2
    assert v.with_exp(5).exp == 5
    assert v.values()[0] == (Fraction(1, 128), Fraction(3, 128))
    with pytest.raises(ValueError):
        FixedVector([1], [1, 2], 0, 8)
    with pytest.raises(AssertionError):
        FixedVector([1 << 8], [1], 0, 8).check()

import random

import pytest
from hypothesis import given, strategies as st

from fastmul.bigint import (Gaussian, format_hex, from_words, gaussian_cyclic_mul, mod_fermat,
                            mod_mersenne, mul_base, mul_karatsuba, mul_schoolbook, overlap_add,
                            pack_digits, parse_hex, unpack_digits, words)

nat = st.integers(min_value=0, max_value=(1 << 3000) - 1)
big = st.builds(lambda n, seed: random.Random(seed).getrandbits(n),
                st.integers(1, 70000), st.integers(0, 1 << 32))


@given(nat, nat)
def test_mul_base_matches_builtin(a, b):
    assert mul_base(a, b) == a * b
    assert mul_base(b, a) == a * b


@given(big, nat)
def test_karatsuba_lopsided_and_large(a, b):
    assert mul_karatsuba(a, b, 2) == a * b
    assert mul_karatsuba(a, a, 1) == a * a


@given(nat, nat)
def test_schoolbook(a, b):
    assert mul_schoolbook(a, b) == a * b
    assert mul_base(a, b, None) == a * b


@given(st.integers(0, 255), nat)
def test_repeated_addition(a, b):
    acc = 0
    for _ in range(a):
        acc += b
    assert mul_base(a, b) == acc


@pytest.mark.parametrize("a,b", [(0, 0), (0, 5), (1, 1), ((1 << 5000) - 1, (1 << 5000) - 1),
                                 (1 << 4096, 1 << 4095), ((1 << 64) - 1, (1 << 64) + 1)])
def test_mul_base_edges(a, b):
    assert mul_base(a, b) == a * b


def test_negative_rejected():
    with pytest.raises(ValueError):
        mul_base(-1, 3)
    with pytest.raises(ValueError):
        mul_karatsuba(3, 3, 0)


@given(st.integers(-(1 << 2000), 1 << 2000), st.integers(1, 300))
def test_mod_mersenne(a, q):
    r = mod_mersenne(a, q)
    assert 0 <= r < (1 << q) - 1 or (q == 1 and r == 0)
    assert (r - a) % ((1 << q) - 1) == 0


@given(st.integers(-(1 << 2000), 1 << 2000), st.integers(1, 300))
def test_mod_fermat(a, q):
    assert mod_fermat(a, q) == a % ((1 << q) + 1)


@given(st.data(), st.integers(2, 200))
def test_gaussian_cyclic_real_embedding(data, q):
    m = (1 << q) - 1
    x = data.draw(st.integers(0, m - 1))
    y = data.draw(st.integers(0, m - 1))
    assert gaussian_cyclic_mul(Gaussian(x, 0), Gaussian(y, 0), q) == (mod_mersenne(x * y, q), 0)


@given(st.data(), st.integers(2, 200))
def test_gaussian_cyclic_product(data, q):
    m = (1 << q) - 1
    xr, xi, yr, yi = (data.draw(st.integers(0, m - 1)) for _ in range(4))
    got = gaussian_cyclic_mul(Gaussian(xr, xi), Gaussian(yr, yi), q)
    assert got == (mod_mersenne(xr * yr - xi * yi, q), mod_mersenne(xr * yi + xi * yr, q))
    assert all(0 <= c < m for c in got)


def test_gaussian_cyclic_rejects_noncanonical():
    with pytest.raises(ValueError):
        gaussian_cyclic_mul(Gaussian(7, 0), Gaussian(1, 0), 3)


@given(st.lists(st.integers(0, (1 << 13) - 1), min_size=0, max_size=100))
def test_pack_unpack_roundtrip(ds):
    x = pack_digits(ds, 13)
    assert x == sum(d << (13 * i) for i, d in enumerate(ds))
    assert unpack_digits(x, 13, len(ds)) == ds


@given(st.lists(st.integers(-(1 << 40), 1 << 40), max_size=80), st.integers(1, 30))
def test_overlap_add(cs, shift):
    assert overlap_add(cs, shift) == sum(c << (shift * i) for i, c in enumerate(cs))


@given(nat)
def test_words_roundtrip(x):
    ws = words(x)
    assert from_words(ws) == x
    assert all(0 <= w < 1 << 64 for w in ws)
    assert not ws or ws[-1] != 0


@given(st.integers(0, 1 << 500))
def test_hex_roundtrip(x):
    assert parse_hex(format_hex(x)) == x
    assert parse_hex(format_hex(x).upper()) == x


@pytest.mark.parametrize("bad", ["", "0x10", "12g", " "])
def test_parse_hex_rejects(bad):
    with pytest.raises(ValueError):
        parse_hex(bad)

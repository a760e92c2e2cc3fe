import math

import pytest
from hypothesis import given, strategies as st
from mpmath import mp

from fastmul.recurrence import (FOUR_LOG_SQUARED, LOG, ContractViolation, SlowFunction,
                                exp3_log4, iterated_exp, iterated_log, log_star, phi_star,
                                recurrence_envelope)

reals = st.floats(min_value=1.0001, max_value=1e300, allow_nan=False)


def test_log_star_values():
    assert log_star(1) == 0
    assert log_star(0.5) == 0
    assert log_star(math.e) == 1
    assert log_star(math.e ** math.e) == 2
    assert log_star(10 ** 6) == 3
    assert log_star(mp.mpf(10) ** 1000) == 4


@given(reals, reals)
def test_log_star_monotone(x, y):
    if x > y:
        x, y = y, x
    assert log_star(x) <= log_star(y)


@given(st.floats(min_value=1.01, max_value=600))
def test_log_star_of_exp(x):
    assert log_star(mp.exp(x)) == log_star(x) + 1


def test_phi_star_log_matches_log_star():
    for x in [1.5, math.e, 20.0, 1e6, 1e100]:
        assert phi_star(LOG, 1, x) == log_star(x)


@given(st.floats(min_value=100.01, max_value=1e200))
def test_identity_four_log_squared(x):
    assert phi_star(FOUR_LOG_SQUARED, 100, x) == phi_star(FOUR_LOG_SQUARED, 100, FOUR_LOG_SQUARED(x)) + 1


@given(st.floats(min_value=16.01, max_value=1e200))
def test_identity_exp3_log4(x):
    phi = exp3_log4()
    assert phi_star(phi, 16, x) == phi_star(phi, 16, phi(x)) + 1


@given(st.floats(min_value=1.0, max_value=1e8))
def test_four_log_squared_close_to_log_star(x):
    assert abs(phi_star(FOUR_LOG_SQUARED, 100, x) - log_star(x)) <= 6


def test_below_sigma_is_zero():
    assert phi_star(FOUR_LOG_SQUARED, 100, 100) == 0
    assert phi_star(FOUR_LOG_SQUARED, 100, 50) == 0


def test_sigma_below_floor_rejected():
    with pytest.raises(ValueError):
        phi_star(FOUR_LOG_SQUARED, 10, 1000)
    with pytest.raises(ValueError):
        phi_star(exp3_log4(), 10, 1000)


def test_step_cap():
    # iterating x -> x - 1/2 from 1e6 needs far more than 10 steps
    slow = SlowFunction(lambda x: x - mp.mpf(1) / 2, 0.0, 0, "shift")
    with pytest.raises(ContractViolation):
        phi_star(slow, 1, 10 ** 6, step_cap=10)


def test_slow_function_contracts():
    FOUR_LOG_SQUARED.check_decreasing([77, 100, 1e6, 1e50])
    FOUR_LOG_SQUARED.check_increasing([77, 100, 1e6, 1e50])
    exp3_log4().check_decreasing([16, 100, 1e10])
    with pytest.raises(ContractViolation):
        SlowFunction(lambda x: x, 0.0).check_decreasing([5])
    with pytest.raises(ContractViolation):
        SlowFunction(lambda x: -x, 0.0).check_increasing([1, 2])


def test_iterated_log_exp():
    assert abs(iterated_log(iterated_exp(2, 3), 3) - 2) < mp.mpf(10) ** -40
    assert abs(iterated_log(mp.e, 1) - 1) < mp.mpf(10) ** -40


def test_envelope():
    assert recurrence_envelope(8, 1, 10, 5) == 1
    assert recurrence_envelope(8, 1, 10, 1e10) == 64
    assert recurrence_envelope(8, 3, 10, 1e10) == 192
    with pytest.raises(ValueError):
        recurrence_envelope(1, 1, 10, 100)
    with pytest.raises(ValueError):
        recurrence_envelope(2, 0, 10, 100)

"""Iterated logarithms and iterators of logarithmically slow functions.

Evaluation is done with mpmath.  log_star uses interval arithmetic, so a
value whose enclosure contains 1 is a tie and counts as <= 1; phi_star
works at high precision and treats values within a relative tolerance of
sigma the same way.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable

import mpmath
from mpmath import iv, mp

WORK_DPS = 60
DEFAULT_STEP_CAP = 10_000


class ContractViolation(RuntimeError):
    pass


def _to_mpf(x):
    if isinstance(x, (mpmath.mpf, int, str)):
        return mp.mpf(x)
    if isinstance(x, float):
        return mp.mpf(x)
    try:
        return mp.mpf(x.numerator) / x.denominator
    except AttributeError:
        return mp.mpf(x)


def _to_interval(x):
    if isinstance(x, (int, float, str)):
        return iv.mpf(x)
    if isinstance(x, mpmath.mpf):
        return iv.mpf(x)
    try:
        return iv.mpf(x.numerator) / x.denominator
    except AttributeError:
        return iv.mpf(x)


@contextmanager
def _iv_precision(dps: int):
    saved = iv.dps
    iv.dps = dps
    try:
        yield
    finally:
        iv.dps = saved


def log_star(x) -> int:
    """min{k : log^k(x) <= 1} with the natural logarithm."""
    with _iv_precision(WORK_DPS):
        y = _to_interval(x)
        k = 0
        while y.a > 1:
            # a straddling enclosure is a tie and stops the count
            if y.b > 1 and y.a <= 1:
                break
            y = iv.log(y)
            k += 1
            if y.b <= 1 or y.a <= 1:
                return k
        return k


@dataclass(frozen=True)
class SlowFunction:
    """A logarithmically slow function Phi with its domain floor and level.

    ``evaluator`` maps an mpmath real to an mpmath real at the current
    working precision.
    """

    evaluator: Callable
    x0: float
    level: int = 0
    name: str = field(default="phi", compare=False)

    def __call__(self, x):
        with mp.workdps(WORK_DPS):
            return self.evaluator(_to_mpf(x))

    def check_decreasing(self, samples) -> None:
        """Assert Phi(x) <= x - 1 at every sample above the floor."""
        for x in samples:
            xm = _to_mpf(x)
            if xm > self.x0 and self(xm) > xm - 1:
                raise ContractViolation(f"{self.name}({x}) > {x} - 1")

    def check_increasing(self, samples) -> None:
        pts = sorted(_to_mpf(x) for x in samples if _to_mpf(x) > self.x0)
        vals = [self(x) for x in pts]
        for (a, fa), (b, fb) in zip(zip(pts, vals), zip(pts[1:], vals[1:])):
            if fb < fa:
                raise ContractViolation(f"{self.name} decreases between {a} and {b}")


def iterated_log(x, k: int):
    with mp.workdps(WORK_DPS):
        y = _to_mpf(x)
        for _ in range(k):
            y = mp.log(y)
        return y


def iterated_exp(x, k: int):
    with mp.workdps(WORK_DPS):
        y = _to_mpf(x)
        for _ in range(k):
            y = mp.exp(y)
        return y


LOG = SlowFunction(mp.log, 1.0, 0, "log")

# largest solution of 4 log(x)^2 = x - 1; Phi(x) <= x - 1 holds above it
FOUR_LOG_SQUARED_FLOOR = 76.04


def _four_log_squared(x):
    return 4 * mp.log(x) ** 2


FOUR_LOG_SQUARED = SlowFunction(_four_log_squared, FOUR_LOG_SQUARED_FLOOR, 2, "4log^2")


def exp3_log4(c: float = 0.5) -> SlowFunction:
    """Phi(x) = exp^3(log^4(x) + c), defined for x > e^e."""

    def phi(x):
        y = mp.log(mp.log(mp.log(mp.log(x))))
        return mp.exp(mp.exp(mp.exp(y + c)))

    return SlowFunction(phi, math.exp(math.e), 4, f"exp3(log4+{c})")


def _at_most(y, sigma, tol) -> bool:
    return y <= sigma or abs(y - sigma) <= tol * max(1, abs(sigma))


def phi_star(phi: SlowFunction, sigma, x, step_cap: int = DEFAULT_STEP_CAP) -> int:
    """min{k : Phi^k(x) <= sigma}."""
    if sigma < phi.x0:
        raise ValueError(f"sigma = {sigma} is below the domain floor {phi.x0}")
    with mp.workdps(WORK_DPS):
        tol = mp.mpf(2) ** (-3 * WORK_DPS)
        s = _to_mpf(sigma)
        y = _to_mpf(x)
        k = 0
        while not _at_most(y, s, tol):
            if k >= step_cap:
                raise ContractViolation(
                    f"{phi.name} iteration did not reach {sigma} within {step_cap} steps")
            y = phi.evaluator(y)
            k += 1
        return k


def recurrence_envelope(K: float, L: float, sigma, y) -> float:
    """L K^(log* y - log* sigma), or L when y <= sigma."""
    if K <= 1:
        raise ValueError("K must exceed 1")
    if L <= 0:
        raise ValueError("L must be positive")
    if _to_mpf(y) <= _to_mpf(sigma):
        return float(L)
    return float(L) * float(K) ** (log_star(y) - log_star(sigma))

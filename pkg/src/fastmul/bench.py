"""Benchmark harness: timed, verified products written as CSV."""
from __future__ import annotations

import csv
import random
import time
from dataclasses import dataclass
from typing import Callable, Iterable, TextIO

from .bigint import mul_base
from .mersenne import mersenne_multiply
from .multiply import MultiplyConfig, int_multiply, int_multiply_via_cyclic

CSV_HEADER = ("n_bits", "algorithm", "seconds", "verified")


@dataclass(frozen=True)
class BenchRecord:
    n_bits: int
    algorithm: str
    seconds: float
    verified: bool

    def row(self) -> list[str]:
        return [str(self.n_bits), self.algorithm, f"{self.seconds:.6f}", str(self.verified).lower()]


class VerificationError(AssertionError):
    pass


def algorithms(config: MultiplyConfig | None = None) -> dict[str, Callable[[int, int], int]]:
    cfg = config or MultiplyConfig()
    return {
        "base": lambda a, b: mul_base(a, b, cfg.karatsuba_threshold),
        "simple_fft": lambda a, b: int_multiply(a, b, cfg),
        "cyclic_fft": lambda a, b: int_multiply_via_cyclic(a, b, cfg),
        "mersenne_cf": lambda a, b: mersenne_multiply(a, b, cfg.mersenne_qp_floor,
                                                      cfg.mersenne_search_cap),
    }


def geometric_sizes(min_bits: int, max_bits: int, steps: int) -> list[int]:
    """``steps`` sizes from min_bits to max_bits with a constant ratio."""
    if min_bits < 1 or max_bits < min_bits:
        raise ValueError("need 1 <= min_bits <= max_bits")
    if steps < 1:
        raise ValueError("steps must be positive")
    if steps == 1:
        return [min_bits]
    ratio = (max_bits / min_bits) ** (1 / (steps - 1))
    sizes = [round(min_bits * ratio ** i) for i in range(steps)]
    sizes[-1] = max_bits
    return sorted(set(sizes))


def run_bench(sizes: Iterable[int], names: Iterable[str] | None = None,
              config: MultiplyConfig | None = None, seed: int = 0,
              on_record: Callable[[BenchRecord], None] | None = None) -> list[BenchRecord]:
    """Time every algorithm on one random pair per size.

    Each product is checked against mul_base before its record is kept;
    a mismatch raises VerificationError.
    """
    table = algorithms(config)
    names = list(table) if names is None else list(names)
    unknown = [n for n in names if n not in table]
    if unknown:
        raise ValueError(f"unknown algorithm(s): {', '.join(unknown)}")
    rng = random.Random(seed)
    records = []
    for bits in sizes:
        a = rng.getrandbits(bits) | (1 << (bits - 1))
        b = rng.getrandbits(bits) | (1 << (bits - 1))
        expected = mul_base(a, b)
        for name in names:
            start = time.perf_counter()
            got = table[name](a, b)
            seconds = time.perf_counter() - start
            if got != expected:
                raise VerificationError(f"{name} disagrees with mul_base at {bits} bits")
            rec = BenchRecord(bits, name, seconds, True)
            records.append(rec)
            if on_record is not None:
                on_record(rec)
    return records


def write_csv(records: Iterable[BenchRecord], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rec in records:
        w.writerow(rec.row())

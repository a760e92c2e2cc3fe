"""Command-line entry point: mul, bench and selftest."""
from __future__ import annotations

import argparse
import random
import sys
from dataclasses import fields
from typing import Sequence

from . import acceptance, bench
from .bigint import format_hex, mul_base, parse_hex
from .multiply import MultiplyConfig, Trace, int_multiply

ALGO_NAMES = {"base": "base", "simple": "simple_fft", "cyclic": "cyclic_fft",
              "mersenne": "mersenne_cf"}

CONFIG_KEYS = ("fft_threshold_bits", "short_exponent", "min_chunk", "chunk_bits",
               "recursion_depth", "karatsuba_threshold", "extra_precision",
               "mersenne_qp_floor", "mersenne_search_cap")


class ConfigError(ValueError):
    pass


def parse_config(text: str, base: MultiplyConfig | None = None) -> MultiplyConfig:
    """Apply ``key = value`` lines to a configuration; '#' starts a comment."""
    known = {f.name for f in fields(MultiplyConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected key = value")
        if key not in CONFIG_KEYS or key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if value.lower() == "none" and key in ("chunk_bits", "karatsuba_threshold"):
            values[key] = None
            continue
        try:
            values[key] = int(value, 0)
        except ValueError:
            raise ConfigError(f"line {lineno}: {key} needs an integer, got {value!r}") from None
    return (base or MultiplyConfig()).with_(**values)


def load_config(path: str | None) -> MultiplyConfig:
    if path is None:
        return MultiplyConfig()
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def cmd_mul(args, config: MultiplyConfig) -> int:
    a = parse_hex(args.a)
    b = parse_hex(args.b)
    if a < 0 or b < 0:
        raise ValueError("operands must be non-negative")
    fn = bench.algorithms(config)[ALGO_NAMES[args.algo]]
    product = fn(a, b)
    if args.verify and product != mul_base(a, b):
        print(f"error: {args.algo} product disagrees with mul_base", file=sys.stderr)
        return 1
    print(format_hex(product))
    return 0


def cmd_bench(args, config: MultiplyConfig) -> int:
    if args.min_bits > args.max_bits:
        print("error: --min-bits exceeds --max-bits", file=sys.stderr)
        return 2
    sizes = bench.geometric_sizes(args.min_bits, args.max_bits, args.steps)
    names = [ALGO_NAMES[a] for a in args.algo] if args.algo else None
    try:
        out = open(args.csv, "w", encoding="utf-8", newline="")
    except OSError as exc:
        print(f"error: cannot write {args.csv}: {exc.strerror}", file=sys.stderr)
        return 1

    def show(rec: bench.BenchRecord) -> None:
        print(f"{rec.n_bits:>9} {rec.algorithm:<12} {rec.seconds:10.4f} s  verified", flush=True)

    with out:
        try:
            records = bench.run_bench(sizes, names, config, args.seed, show)
        except bench.VerificationError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        bench.write_csv(records, out)
    print(f"wrote {len(records)} rows to {args.csv}")
    return 0


def fault_probe(config: MultiplyConfig, seed: int = 0) -> acceptance.CheckResult:
    """One transform-sized product under the given configuration, checked against mul_base."""
    rng = random.Random(seed)
    bits = max(config.fft_threshold_bits, 1 << 15)
    a = rng.getrandbits(bits) | (1 << (bits - 1))
    b = rng.getrandbits(bits) | (1 << (bits - 1))
    tr = Trace()
    try:
        ok = int_multiply(a, b, config, tr) == mul_base(a, b)
        detail = (f"{bits}-bit product {'matches' if ok else 'differs from'} mul_base, "
                  f"eps_max {tr.eps_max:.3g}")
    except ArithmeticError as exc:
        ok = False
        detail = f"violated invariant: {exc}"
    return acceptance.CheckResult("probe", "multiply", ok, detail, metrics={"eps_max": tr.eps_max})


def cmd_selftest(args, config: MultiplyConfig) -> int:
    if args.inject_fault:
        config = config.with_(inject_fault=True)
    suites = args.suite or list(acceptance.SUITES)
    scale = acceptance.QUICK if args.quick else acceptance.FULL
    log = (lambda msg: print(f"  .. {msg}", flush=True)) if args.verbose else None
    run = acceptance.AcceptanceRun(scale, args.seed, config, log)
    results = [fault_probe(config, args.seed)]
    print(results[0].line(), flush=True)
    eps_max = results[0].metrics["eps_max"]
    for suite in suites:
        labels = acceptance.labels_for([suite])
        suite_results = []
        for label in labels:
            res = run.run([label])[0]
            print(res.line(), flush=True)
            suite_results.append(res)
            eps_max = max(eps_max, res.metrics.get("eps_max", 0.0))
        passed = sum(r.passed for r in suite_results)
        note = f", eps_max {eps_max:.3g}" if suite == "multiply" else ""
        print(f"suite {suite}: {passed}/{len(suite_results)} passed{note}", flush=True)
        results += suite_results
    failed = [r for r in results if not r.passed]
    print(f"max observed rounding margin eps_max = {eps_max:.3g}")
    if failed:
        print(f"selftest FAILED: {len(failed)} check(s)", file=sys.stderr)
        for r in failed:
            print(f"  {r.line()}", file=sys.stderr)
        return 1
    print(f"selftest passed ({scale.name} scale)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fastmul",
                                     description="Integer multiplication through complex transforms.")
    parser.add_argument("--config", metavar="PATH", help="key = value overrides of the defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mul", help="multiply two hexadecimal integers")
    p.add_argument("a", help="big-endian hex, no prefix")
    p.add_argument("b", help="big-endian hex, no prefix")
    p.add_argument("--algo", choices=list(ALGO_NAMES), default="simple")
    p.add_argument("--verify", action="store_true", help="check the product against mul_base")
    p.set_defaults(func=cmd_mul)

    p = sub.add_parser("bench", help="time verified products and write CSV")
    p.add_argument("--min-bits", type=int, required=True)
    p.add_argument("--max-bits", type=int, required=True)
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--csv", required=True, metavar="PATH")
    p.add_argument("--algo", action="append", choices=list(ALGO_NAMES),
                   help="repeat to select several; default all")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", help="run the acceptance checks")
    p.add_argument("--suite", action="append", choices=list(acceptance.SUITES),
                   help="repeat to select several; default all")
    p.add_argument("--quick", action="store_true", help="reduced sample counts")
    p.add_argument("--inject-fault", action="store_true",
                   help="flip one mantissa bit before every rounding")
    p.add_argument("--seed", type=int, default=20240601)
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
    except (OSError, ConfigError) as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args, config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

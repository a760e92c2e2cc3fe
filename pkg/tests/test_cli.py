import csv
import subprocess
import sys

import pytest

from fastmul.bigint import format_hex
from fastmul.cli import ConfigError, main, parse_config
from fastmul.multiply import MultiplyConfig


def run(*argv):
    return subprocess.run([sys.executable, "-m", "fastmul", *argv],
                          capture_output=True, text=True, timeout=1800)


@pytest.mark.parametrize("algo", ["base", "simple", "cyclic", "mersenne"])
def test_mul(algo, capsys):
    a, b = 0xDEADBEEF << 300 | 12345, 0xC0FFEE << 500 | 7
    assert main(["mul", format_hex(a), format_hex(b), "--algo", algo, "--verify"]) == 0
    assert capsys.readouterr().out.strip() == format_hex(a * b)


def test_mul_zero(capsys):
    assert main(["mul", "0", "ff"]) == 0
    assert capsys.readouterr().out.strip() == "0"


def test_mul_rejects_bad_hex(capsys):
    assert main(["mul", "xyz", "1"]) != 0
    assert "error" in capsys.readouterr().err


def test_bench_csv(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--min-bits", "64", "--max-bits", "4096", "--steps", "4",
                 "--csv", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["n_bits", "algorithm", "seconds", "verified"]
    assert len(rows) == 1 + 4 * 4
    assert all(r[3] == "true" for r in rows[1:])
    assert {r[1] for r in rows[1:]} == {"base", "simple_fft", "cyclic_fft", "mersenne_cf"}


def test_bench_selected_algorithms(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--min-bits", "100", "--max-bits", "100", "--steps", "1",
                 "--csv", str(out), "--algo", "base", "--algo", "cyclic"]) == 0
    rows = list(csv.reader(out.open()))[1:]
    assert [r[1] for r in rows] == ["base", "cyclic_fft"]


def test_bench_bad_path(tmp_path):
    assert main(["bench", "--min-bits", "64", "--max-bits", "128",
                 "--csv", str(tmp_path / "missing" / "x.csv")]) == 1


def test_bench_bad_range(tmp_path):
    assert main(["bench", "--min-bits", "128", "--max-bits", "64",
                 "--csv", str(tmp_path / "x.csv")]) != 0


def test_parse_config():
    cfg = parse_config("fft_threshold_bits = 0x100  # hex ok\n\nkaratsuba_threshold = none\n")
    assert cfg.fft_threshold_bits == 256
    assert cfg.karatsuba_threshold is None
    assert cfg.short_exponent == MultiplyConfig().short_exponent


@pytest.mark.parametrize("text", ["nonsense", "bogus = 1", "min_chunk = abc", "= 3",
                                  "fft_threshold_bits = none"])
def test_parse_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_config_file(tmp_path, capsys):
    path = tmp_path / "fm.conf"
    path.write_text("fft_threshold_bits = 1\n")
    assert main(["--config", str(path), "mul", "abc", "def", "--verify"]) == 0
    assert capsys.readouterr().out.strip() == format_hex(0xABC * 0xDEF)
    path.write_text("unknown_key = 1\n")
    assert main(["--config", str(path), "mul", "1", "1"]) == 2
    assert main(["--config", str(tmp_path / "nope.conf"), "mul", "1", "1"]) == 2


def test_selftest_quick_suite():
    proc = run("selftest", "--quick", "--suite", "fixed_point", "--suite", "recurrence")
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "suite fixed_point: 1/1 passed" in proc.stdout
    assert "suite recurrence: 1/1 passed" in proc.stdout
    assert "eps_max" in proc.stdout


def test_selftest_inject_fault():
    proc = run("selftest", "--quick", "--suite", "fixed_point", "--inject-fault")
    assert proc.returncode != 0
    assert "FAIL" in proc.stdout


def test_console_script_help():
    proc = run("--help")
    assert proc.returncode == 0
    for cmd in ("mul", "bench", "selftest"):
        assert cmd in proc.stdout

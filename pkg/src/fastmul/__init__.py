"""Exact integer multiplication through fixed-point complex transforms.

The main entry points are ``int_multiply`` (simple engine),
``int_multiply_via_cyclic`` (cyclic engine with a reusable operand
transform) and ``mersenne_multiply`` (Crandall-Fagin transforms over
F_P[i] for a Mersenne prime P).  ``mul_base`` is the reference product.
"""
from .bigint import Gaussian, format_hex, mul_base, parse_hex
from .mersenne import cf_cyclic_mul, cf_layout, lucas_lehmer, mersenne_multiply
from .multiply import (MultiplyConfig, Trace, alpha, cyclic_mul_fixed, int_multiply,
                       int_multiply_via_cyclic)

__version__ = "0.1.0"

__all__ = [
    "Gaussian", "MultiplyConfig", "Trace", "alpha", "cf_cyclic_mul", "cf_layout",
    "cyclic_mul_fixed", "format_hex", "int_multiply", "int_multiply_via_cyclic",
    "lucas_lehmer", "mersenne_multiply", "mul_base", "parse_hex",
]

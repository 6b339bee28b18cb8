"""Exact-rational metrics and canonical trace utilities.

Rationals cross the native boundary as ``(numerator, denominator)`` tuples;
``as_fraction`` converts them to ``fractions.Fraction`` for arithmetic on the
python side. Traces, configs, and outcomes travel as their serialized JSON
strings, the same wire form the run logs use.
"""

from fractions import Fraction

from ._core import (
    CoreError,
    build_stage_plan,
    canonicalize_trace,
    config_fingerprint,
    cvar,
    cvar_column_name,
    default_run_config,
    divergence_point,
    estimate_tokens,
    evaluate_gate,
    mean_ca,
    normalize_text,
    outcomes_equal,
    percentile_nearest_rank,
    rational_decimal,
    rational_from_string,
    sha256_hex,
    success_rate,
    trace_hash_hex,
)

__all__ = [
    "CoreError",
    "as_fraction",
    "build_stage_plan",
    "canonicalize_trace",
    "config_fingerprint",
    "cvar",
    "cvar_column_name",
    "default_run_config",
    "divergence_point",
    "estimate_tokens",
    "evaluate_gate",
    "mean_ca",
    "normalize_text",
    "outcomes_equal",
    "percentile_nearest_rank",
    "rational_decimal",
    "rational_from_string",
    "sha256_hex",
    "success_rate",
    "trace_hash_hex",
]


def as_fraction(value):
    """Convert a (num, den) tuple from this module into a Fraction."""
    num, den = value
    return Fraction(num, den)

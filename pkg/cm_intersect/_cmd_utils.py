from __future__ import annotations

import csv
import json
import logging
import os
from fractions import Fraction
from typing import Any, Iterable, Sequence

from ._errors import CMIntersectError

_logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
CSV_HEADER = ("a", "theta", "diff", "L", "R", "p", "c_p")

DEFAULT_THREADS = 1
DEFAULT_MAX_PREC_BITS = 65536


def get_env_int(name: str, default: int) -> int:
    """
    Read a positive integer from the environment.

    Args:
        name (str): Variable name
        default (int): Value when the variable is unset or empty

    Returns:
        int: The value

    Raises:
        CMIntersectError: If the variable is set but not a positive integer
    """
    raw = os.getenv(name)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise CMIntersectError(f"${name} must be an integer, got '{raw}'")
    if value < 1:
        raise CMIntersectError(f"${name} must be positive, got {value}")
    _logger.debug(f"Using ${name}={value}")
    return value


def get_default_threads() -> int:
    return get_env_int("CM_INTERSECT_THREADS", DEFAULT_THREADS)


def get_max_prec_bits() -> int:
    """
    Precision cap of the numerical oracle, from $CM_INTERSECT_MAX_PREC_BITS.
    """
    return get_env_int("CM_INTERSECT_MAX_PREC_BITS", DEFAULT_MAX_PREC_BITS)


def fraction_to_str(value: Fraction | int) -> str:
    """
    Exact text form: "n" for integers, "n/d" otherwise.
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def fraction_from_str(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise CMIntersectError(f"'{text}' is not an exact rational")


def make_envelope(command: str, inputs: dict[str, Any], result: Any) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "result": result,
    }


def dump_envelope(envelope: dict[str, Any]) -> str:
    return json.dumps(envelope, indent=2)


def write_report_csv(path: str, rows: Iterable[Sequence[Any]]) -> None:
    """
    Write report rows under the header (a, theta, diff, L, R, p, c_p).

    Raises:
        CMIntersectError: If the file cannot be written
    """
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(CSV_HEADER)
            writer.writerows(rows)
    except OSError as e:
        raise CMIntersectError(f"Could not write CSV to {path}: {e}")
    _logger.info(f"Report written to {path}")

"""
Numerical cross-check of the split case: J(d1, d2)^2 from the values of j at
CM points, computed with mpmath and rounded to an integer under a certified
error bound.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, isqrt
from typing import Any, NamedTuple

from mpmath.ctx_mp import MPContext
from sympy import divisor_sigma

from ._arith import factorize
from ._cmd_utils import fraction_to_str, get_max_prec_bits
from ._degrees import ArithDegree
from ._errors import CMIntersectError, ConfigValidationError, PrecisionExhaustedError
from ._fields import is_fundamental, unit_count, validate
from ._hecke import intersection_number

_logger = logging.getLogger(__name__)

MAX_SERIES_TERMS = 10**6
MIN_IM_TAU = math.sqrt(3) / 2
# guard bits carried on top of the requested precision
GUARD_BITS = 48
ROUNDING_GATE = 0.25


def _context(prec: int) -> MPContext:
    # mpmath's global context is shared; each computation gets its own
    ctx = MPContext()
    ctx.prec = prec
    return ctx


class ReducedForm(NamedTuple):
    """
    The positive definite binary quadratic form a*x^2 + b*x*y + c*y^2.
    """

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def im_tau(self) -> float:
        return math.sqrt(-self.discriminant) / (2 * self.a)

    def cm_point(self, ctx: MPContext) -> Any:
        """
        tau = (-b + sqrt(d)) / (2a) in the upper half plane, at the precision of ctx.
        """
        two_a = 2 * self.a
        return ctx.mpc(ctx.mpf(-self.b) / two_a, ctx.sqrt(-self.discriminant) / two_a)

    def j_invariant(self, prec: int) -> Any:
        ctx = _context(prec + math.ceil(magnitude_bits(self.im_tau)) + GUARD_BITS)
        return _j_series(ctx, self.cm_point(ctx), self.im_tau, ctx.prec)


def _check_discriminant(d: int) -> None:
    if d >= 0:
        raise ConfigValidationError("NotNegative", f"discriminant {d} must be negative")
    if not is_fundamental(d):
        raise ConfigValidationError("NotFundamental", f"{d} is not a fundamental discriminant")


def reduced_forms(d: int) -> list[ReducedForm]:
    """
    One reduced form per class of discriminant d, ascending in (a, b).

    Args:
        d (int): Negative fundamental discriminant

    Returns:
        list[ReducedForm]: h(d) forms

    Raises:
        ConfigValidationError: If d is not a negative fundamental discriminant
    """
    _check_discriminant(d)

    forms = []
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b - d) % 2:
                continue
            numerator = b * b - d
            if numerator % (4 * a):
                continue
            c = numerator // (4 * a)
            if c < a or (b < 0 and a == c):
                continue
            if gcd(gcd(a, b), c) == 1:
                forms.append(ReducedForm(a, b, c))
        a += 1
    return forms


def class_number(d: int) -> int:
    return len(reduced_forms(d))


def brute_force_class_number(d: int) -> int:
    """
    Count reduced primitive forms of discriminant d by scanning every
    (a, c) with a <= c <= |d| and solving for b.
    """
    _check_discriminant(d)

    count = 0
    for a in range(1, -d + 1):
        for c in range(a, -d + 1):
            b_squared = d + 4 * a * c
            if b_squared < 0:
                continue
            root = isqrt(b_squared)
            if root * root != b_squared or root > a:
                continue
            for b in {root, -root}:
                if b < 0 and (-b == a or a == c):
                    continue
                if gcd(gcd(a, b), c) == 1:
                    count += 1
    return count


def magnitude_bits(im_tau: float) -> float:
    """
    Upper bound for log2|j(tau)| on the fundamental domain.
    """
    return 2 * math.pi * im_tau / math.log(2) + 12


def _series_terms(im_tau: float, target_bits: int) -> int:
    """
    Smallest N such that the tails of the E4 series and of the eta product
    both stay below 2^-target_bits.

    Raises:
        CMIntersectError: If more than MAX_SERIES_TERMS terms would be needed
    """
    log2_r = -2 * math.pi * im_tau / math.log(2)
    r = 2.0**log2_r
    e4_denominator = math.log2(1 - 16 * r)
    delta_denominator = math.log2(1 - r)

    n = 1
    while n <= MAX_SERIES_TERMS:
        e4_tail = math.log2(240) + 4 * math.log2(n + 1) + (n + 1) * log2_r - e4_denominator
        delta_tail = math.log2(48) + (n + 1) * log2_r - delta_denominator
        if max(e4_tail, delta_tail) <= -target_bits:
            return n
        n += 1
    raise CMIntersectError(
        f"precision request infeasible: {target_bits} bits need more than {MAX_SERIES_TERMS} series terms"
    )


def _j_series(ctx: MPContext, tau: Any, im_tau: float, target_bits: int) -> Any:
    if im_tau < MIN_IM_TAU - 1e-12:
        raise CMIntersectError(f"Im(tau) = {im_tau} is below sqrt(3)/2; reduce tau first")

    terms = _series_terms(im_tau, target_bits)
    q = ctx.exp(2 * ctx.pi * ctx.j * tau)

    e4_sum = ctx.mpc(0)
    eta_product = ctx.mpc(1)
    q_n = ctx.mpc(1)
    for n in range(1, terms + 1):
        q_n *= q
        e4_sum += int(divisor_sigma(n, 3)) * q_n
        eta_product *= 1 - q_n

    e4 = 1 + 240 * e4_sum
    delta = q * eta_product**24
    return e4**3 / delta


def j_invariant(tau: Any, prec: int) -> Any:
    """
    The modular invariant j(tau) = E4(q)^3 / Delta(q), q = exp(2*pi*i*tau).

    Args:
        tau (mpc | complex): Point with Im(tau) >= sqrt(3)/2
        prec (int): Precision in bits; the absolute error is at most 2^(-prec/2)

    Returns:
        mpc: j(tau)

    Raises:
        CMIntersectError: If Im(tau) is too small or the precision is infeasible
    """
    if prec < 1:
        raise CMIntersectError(f"precision must be positive, got {prec}")

    im_tau = float(complex(tau).imag)
    ctx = _context(prec + math.ceil(magnitude_bits(max(im_tau, MIN_IM_TAU))) + GUARD_BITS)
    return _j_series(ctx, ctx.convert(tau), im_tau, ctx.prec)


def initial_precision(d1: int, d2: int) -> int:
    """
    Starting precision for gz_square: 64 + ceil(3.02 * B) where B sums, over
    all class pairs, a bound on log2|j(tau1) - j(tau2)|.

    Each pair uses the larger of its two magnitude bounds
    2*pi*Im(tau)/ln 2 + 12 plus one bit, not a single worst case built from
    Im(tau) = sqrt(|d1*d2|)/2. The per-pair sum is smaller for pairs with
    several classes; a start that is too low is caught by the rounding gate
    and doubled.
    """
    bits = 0.0
    for f1, f2 in product(reduced_forms(d1), reduced_forms(d2)):
        bits += max(magnitude_bits(f1.im_tau), magnitude_bits(f2.im_tau)) + 1
    return 64 + math.ceil(3.02 * bits)


def _try_precision(d1: int, d2: int, prec: int) -> int | None:
    """
    Evaluate the rounded J^2 at one precision; None when the gate fails.
    """
    forms1, forms2 = reduced_forms(d1), reduced_forms(d2)
    max_magnitude = max(math.ceil(magnitude_bits(f.im_tau)) for f in forms1 + forms2)
    ctx = _context(prec + max_magnitude + GUARD_BITS)
    wp = ctx.prec

    def evaluate(form: ReducedForm) -> tuple[Any, Any]:
        value = _j_series(ctx, form.cm_point(ctx), form.im_tau, wp)
        error = ctx.ldexp(1, math.ceil(magnitude_bits(form.im_tau)) - wp + 24)
        return value, error

    values1 = [evaluate(f) for f in forms1]
    values2 = [evaluate(f) for f in forms2]

    total = ctx.mpc(1)
    relative_error = ctx.mpf(0)
    for (j1, err1), (j2, err2) in product(values1, values2):
        difference = j1 - j2
        lower = abs(difference) - (err1 + err2)
        if lower <= 0:
            _logger.debug(f"j difference not separated from zero at {prec} bits")
            return None
        relative_error = (1 + relative_error) * (1 + (err1 + err2) / lower) - 1
        total *= difference
    relative_error += len(values1) * len(values2) * ctx.ldexp(1, 2 - wp)

    magnitude = abs(total)
    if abs(ctx.im(total)) > magnitude * max(ctx.ldexp(1, 16 - prec // 2), 4 * relative_error):
        _logger.debug(f"product has imaginary part {ctx.im(total)} at {prec} bits")
        return None

    exponent = ctx.mpf(8) / (unit_count(d1) * unit_count(d2))
    value = ctx.power(magnitude, exponent)
    error = value * ((1 + relative_error) ** exponent - 1)
    error += value * (abs(ctx.log(magnitude)) + 16) * ctx.ldexp(1, 4 - wp)

    nearest = int(ctx.nint(value))
    distance = abs(value - nearest)
    _logger.debug(f"J^2 ~ {ctx.nstr(value, 30)} at {prec} bits, distance {ctx.nstr(distance, 5)}")
    if nearest < 1 or distance + error >= ROUNDING_GATE:
        return None
    return nearest


def _gz_square(d1: int, d2: int, prec: int | None, max_prec: int | None) -> tuple[int, int]:
    validate(d1, d2)
    prec = prec or initial_precision(d1, d2)
    max_prec = max_prec or get_max_prec_bits()

    while prec <= max_prec:
        result = _try_precision(d1, d2, prec)
        if result is not None:
            return result, prec
        _logger.warning(f"Rounding of J({d1}, {d2})^2 unresolved at {prec} bits, doubling precision")
        prec *= 2
    raise PrecisionExhaustedError(
        f"precision exhausted: J({d1}, {d2})^2 could not be rounded with at most {max_prec} bits"
    )


def gz_square(d1: int, d2: int, prec: int | None = None, max_prec: int | None = None) -> int:
    """
    The integer J(d1, d2)^2 = |prod (j(tau1) - j(tau2))|^(8/(w1*w2)).

    Args:
        d1 (int): Negative fundamental discriminant
        d2 (int): Negative fundamental discriminant, coprime to d1
        prec (int, optional): Starting precision in bits. Defaults to initial_precision(d1, d2).
        max_prec (int, optional): Precision cap. Defaults to $CM_INTERSECT_MAX_PREC_BITS or 65536.

    Returns:
        int: J(d1, d2)^2

    Raises:
        ConfigValidationError: If the discriminants are invalid
        PrecisionExhaustedError: If the rounding gate fails up to the cap
    """
    return _gz_square(d1, d2, prec, max_prec)[0]


@dataclass(frozen=True)
class GZComparison:
    d1: int
    d2: int
    j_squared: int
    precision: int
    oracle: dict[int, int]
    formula: ArithDegree
    matches: dict[int, bool]
    ratios: dict[int, Fraction | None]
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "j_squared": str(self.j_squared),
            "precision_bits": self.precision,
            "oracle_exponents": {str(p): str(e) for p, e in self.oracle.items()},
            "formula_coeffs": self.formula.to_dict(),
            "matches": {str(p): ok for p, ok in self.matches.items()},
            "ratios": {
                str(p): None if ratio is None else fraction_to_str(ratio)
                for p, ratio in self.ratios.items()
            },
            "pass": self.passed,
        }


def gz_compare(d1: int, d2: int, prec: int | None = None, threads: int = 1) -> GZComparison:
    """
    Compare the factorization of J(d1, d2)^2 with the intersection number
    for dB = 1, m = 1, prime by prime.
    """
    config = validate(d1, d2)
    value, used_prec = _gz_square(d1, d2, prec, None)
    oracle = dict(factorize(value))
    formula = intersection_number(config, threads=threads)

    matches: dict[int, bool] = {}
    ratios: dict[int, Fraction | None] = {}
    for p in sorted(set(oracle) | set(formula.support)):
        exponent, coefficient = oracle.get(p, 0), formula.coefficient(p)
        matches[p] = exponent == coefficient
        ratios[p] = Fraction(exponent) / coefficient if coefficient else None

    passed = all(matches.values())
    if not passed:
        _logger.warning(
            f"J({d1}, {d2})^2 = {value} disagrees with the intersection number {formula}; "
            f"ratios {ratios}"
        )
    return GZComparison(d1, d2, value, used_prec, oracle, formula, matches, ratios, passed)

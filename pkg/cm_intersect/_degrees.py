"""
Arithmetic degrees of the CM cycles X_{theta, alpha}: the Diff set, the
local lengths nu and nu', orbital integrals and the closed degree formulas.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import prod
from typing import Iterable, Mapping

from ._arith import factorize
from ._cmd_utils import fraction_from_str, fraction_to_str
from ._errors import CMIntersectError, InconsistentDataError
from ._cmdata import AlphaElement, ThetaHom, a_theta, theta_kernel_contains
from ._fields import (
    CMPairConfig,
    FIdeal,
    KSplitting,
    PrimeF,
    different,
    ideal_of,
    rho,
    rho_at,
)

_logger = logging.getLogger(__name__)


class ArithDegree:
    """
    A formal sum of c_p * log(p) with exact nonnegative rational coefficients.

    Args:
        coefficients (Mapping[int, Fraction | int], optional): Map from
            rational primes to coefficients. Zero coefficients are dropped.
    """

    def __init__(self, coefficients: Mapping[int, Fraction | int] | None = None):
        self._coefficients: dict[int, Fraction] = {}
        for p, c in sorted((coefficients or {}).items()):
            c = Fraction(c)
            if c < 0:
                raise CMIntersectError(f"coefficient {c} of log({p}) is negative")
            if c != 0:
                self._coefficients[int(p)] = c

    @classmethod
    def zero(cls) -> ArithDegree:
        return cls()

    @classmethod
    def log(cls, p: int, coefficient: Fraction | int = 1) -> ArithDegree:
        return cls({p: coefficient})

    @classmethod
    def sum(cls, degrees: Iterable[ArithDegree]) -> ArithDegree:
        total = cls()
        for degree in degrees:
            total = total + degree
        return total

    def __add__(self, other: ArithDegree) -> ArithDegree:
        merged = dict(self._coefficients)
        for p, c in other._coefficients.items():
            merged[p] = merged.get(p, Fraction(0)) + c
        return ArithDegree(merged)

    def __mul__(self, scalar: Fraction | int) -> ArithDegree:
        if scalar < 0:
            raise CMIntersectError(f"cannot scale a degree by the negative factor {scalar}")
        return ArithDegree({p: c * scalar for p, c in self._coefficients.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ArithDegree) and self._coefficients == other._coefficients

    def __hash__(self) -> int:
        return hash(tuple(self._coefficients.items()))

    def is_zero(self) -> bool:
        return not self._coefficients

    def terms(self) -> list[tuple[int, Fraction]]:
        """
        The exact view: (p, c_p) pairs, ascending in p.
        """
        return list(self._coefficients.items())

    def coefficient(self, p: int) -> Fraction:
        return self._coefficients.get(p, Fraction(0))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self._coefficients)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 and c >= 0 for c in self._coefficients.values())

    def to_dict(self) -> dict[str, str]:
        """
        JSON-safe exact form: prime keys and "num/den" values as strings.
        """
        return {str(p): fraction_to_str(c) for p, c in self._coefficients.items()}

    @classmethod
    def from_dict(cls, data: Mapping[str, str]) -> ArithDegree:
        return cls({int(p): fraction_from_str(c) for p, c in data.items()})

    def log_value(self) -> float:
        """
        Floating approximation of sum of c_p * ln(p).
        """
        return math.fsum(float(c) * math.log(p) for p, c in self._coefficients.items())

    def __str__(self) -> str:
        if not self._coefficients:
            return "0"
        return " + ".join(f"{c}*log({p})" for p, c in self._coefficients.items())

    def __repr__(self) -> str:
        return f"ArithDegree({self})"


class LengthBranch(Enum):
    NU = "Nu"
    NU_PRIME = "NuPrime"


def _companion_ideal(alpha: AlphaElement, config: CMPairConfig) -> FIdeal:
    """
    The ideal (e) = alpha * D_F.
    """
    return ideal_of(alpha.companion, config)


def diff_set(alpha: AlphaElement, theta: ThetaHom, config: CMPairConfig) -> tuple[PrimeF, ...]:
    """
    Primes of F where the character of K/F is -1 on alpha * a_theta * D_F.

    The character is unramified: +1 at primes split in K, (-1)^ord at primes
    inert in K.
    """
    ideal = _companion_ideal(alpha, config) * a_theta(theta, config)
    return tuple(
        prime
        for prime, exp in ideal.items()
        if prime.k_splitting is KSplitting.INERT_IN_K and exp % 2 == 1
    )


def local_length(
    alpha: AlphaElement, prime: PrimeF, branch: LengthBranch, config: CMPairConfig
) -> Fraction:
    """
    Length of the local ring at a point of X_{theta, alpha} over `prime`.

    Args:
        alpha (AlphaElement): The element alpha
        prime (PrimeF): Prime of F
        branch (LengthBranch): NU gives ord(alpha * p * D_F) / 2,
            NU_PRIME gives ord(alpha) / 2
        config (CMPairConfig): Problem instance

    Returns:
        Fraction: The length
    """
    e_valuation = _companion_ideal(alpha, config).exponent(prime)
    if branch is LengthBranch.NU:
        return Fraction(e_valuation + 1, 2)
    return Fraction(e_valuation - different(config).exponent(prime), 2)


def _kernel_prime_over(theta: ThetaHom, ell: int) -> FIdeal:
    for local in theta.components:
        if local.p == ell:
            return FIdeal.prime(local.kernel)
    return FIdeal()


def orbital_integral(
    ell: int, alpha: AlphaElement, theta: ThetaHom, prime_diff: PrimeF, config: CMPairConfig
) -> int:
    """
    The orbital integral O_ell attached to alpha and theta when
    Diff_theta(alpha) = {prime_diff}.

    Raises:
        CMIntersectError: If the Diff set is not {prime_diff}
    """
    diff = diff_set(alpha, theta, config)
    if diff != (prime_diff,):
        raise CMIntersectError(f"Diff set is {[str(q) for q in diff]}, not {{{prime_diff}}}")

    ideal = _companion_ideal(alpha, config) / _kernel_prime_over(theta, ell)
    if ell == prime_diff.p:
        ideal = ideal / FIdeal.prime(prime_diff)
    return rho_at(ideal, ell)


def orbital_integrals(
    alpha: AlphaElement, theta: ThetaHom, prime_diff: PrimeF, config: CMPairConfig
) -> dict[int, int]:
    """
    O_ell for every ell dividing N(e) * dB * p; all other factors are 1.
    """
    primes = {p for p, _ in factorize(alpha.companion_norm() * config.dB * prime_diff.p)}
    return {ell: orbital_integral(ell, alpha, theta, prime_diff, config) for ell in sorted(primes)}


@dataclass(frozen=True)
class DegreeTerm:
    """
    The pieces of deg(X_{theta, alpha}): the Diff set, the length L, the
    ideal count R and the resulting degree L * R * log(p).
    """

    alpha: AlphaElement
    theta: ThetaHom
    diff: tuple[PrimeF, ...]
    length: Fraction | None
    count: int | None
    degree: ArithDegree


def _length_factor(alpha: AlphaElement, theta: ThetaHom, prime: PrimeF, config: CMPairConfig) -> Fraction:
    if prime.p not in config.db_primes:
        return local_length(alpha, prime, LengthBranch.NU, config)
    if theta_kernel_contains(theta, prime):
        return local_length(alpha, prime, LengthBranch.NU_PRIME, config)
    # ord(alpha * p) / 2; prime does not divide the different here
    return Fraction(_companion_ideal(alpha, config).exponent(prime) + 1, 2)


def degree_term(alpha: AlphaElement, theta: ThetaHom, config: CMPairConfig) -> DegreeTerm:
    """
    Compute deg(X_{theta, alpha}) with its ingredients.
    """
    diff = diff_set(alpha, theta, config)
    if len(diff) != 1:
        return DegreeTerm(alpha, theta, diff, None, None, ArithDegree.zero())

    (prime,) = diff
    length = _length_factor(alpha, theta, prime, config)
    count = rho(_companion_ideal(alpha, config) / a_theta(theta, config) / FIdeal.prime(prime))

    coefficient = length * count
    if coefficient.denominator != 1 or coefficient < 0:
        raise InconsistentDataError(
            f"degree coefficient {coefficient} at {prime} for a={alpha.a}, {theta} is not a nonnegative integer"
        )

    _logger.debug(f"a={alpha.a}, {theta}: Diff={{{prime}}}, L={length}, R={count}")
    return DegreeTerm(alpha, theta, diff, length, count, ArithDegree.log(prime.p, coefficient))


def degree_X(alpha: AlphaElement, theta: ThetaHom, config: CMPairConfig) -> ArithDegree:
    """
    deg(X_{theta, alpha}) as a combination of log(p).
    """
    return degree_term(alpha, theta, config).degree


def degree_X_classical(alpha: AlphaElement, config: CMPairConfig) -> ArithDegree:
    """
    deg(X_alpha) for the split quaternion algebra:
    1/2 * log(p) * ord_p(alpha * p * D_F) * rho(alpha * p^-1 * D_F) when
    Diff(alpha) = {p}, zero otherwise.
    """
    if config.dB != 1:
        raise CMIntersectError(f"the classical degree formula needs dB = 1, got {config.dB}")

    ideal = _companion_ideal(alpha, config)
    diff = [
        prime
        for prime, exp in ideal.items()
        if prime.k_splitting is KSplitting.INERT_IN_K and exp % 2 == 1
    ]
    if len(diff) != 1:
        return ArithDegree.zero()

    (prime,) = diff
    ord_alpha_p_d = ideal.exponent(prime) + 1
    coefficient = Fraction(ord_alpha_p_d, 2) * rho(ideal / FIdeal.prime(prime))
    return ArithDegree.log(prime.p, coefficient)


def eisenstein_coeff(alpha: AlphaElement, config: CMPairConfig) -> ArithDegree:
    """
    Fourier coefficient a_alpha of the derivative of the Hilbert Eisenstein
    series, equal to 4 * deg(X_alpha).
    """
    return 4 * degree_X_classical(alpha, config)


def orbital_product(alpha: AlphaElement, theta: ThetaHom, prime_diff: PrimeF, config: CMPairConfig) -> int:
    return prod(orbital_integrals(alpha, theta, prime_diff, config).values())

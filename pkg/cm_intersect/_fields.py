"""
The real quadratic field F = Q(sqrt(d1*d2)) inside the biquadratic field
K = K1*K2: configuration checks, prime splitting, valuations, factored
ideals, the different and the ideal-counting function rho.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, prod
from typing import Iterable, Iterator, Mapping

from sympy import isprime

from ._arith import MonicQuadratic, factorize, hensel_root, kronecker, ord_p, roots_mod_p
from ._errors import CMIntersectError, ConfigValidationError, InconsistentDataError

_logger = logging.getLogger(__name__)


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for _, e in factorize(abs(n)))


def is_fundamental(d: int) -> bool:
    """
    Whether d is the discriminant of a quadratic field.
    """
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        k = d // 4
        return k % 4 in (2, 3) and is_squarefree(k)
    return False


def unit_count(d: int) -> int:
    """
    Order of the unit group of the imaginary quadratic order of discriminant d.
    """
    return {-3: 6, -4: 4}.get(d, 2)


@dataclass(frozen=True)
class CMPairConfig:
    """
    A validated problem instance. Build it with `validate`.

    Args:
        d1 (int): First negative fundamental discriminant
        d2 (int): Second negative fundamental discriminant, coprime to d1
        dB (int): Discriminant of the quaternion algebra (1 for the split algebra)
        m (int): Hecke index
    """

    d1: int
    d2: int
    dB: int = 1
    m: int = 1

    @property
    def D(self) -> int:
        return self.d1 * self.d2

    @property
    def w1(self) -> int:
        return unit_count(self.d1)

    @property
    def w2(self) -> int:
        return unit_count(self.d2)

    @cached_property
    def db_primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in factorize(self.dB))

    def to_dict(self) -> dict[str, int]:
        return {"d1": self.d1, "d2": self.d2, "dB": self.dB, "m": self.m, "D": self.D}


def validate(d1: int, d2: int, dB: int = 1, m: int = 1) -> CMPairConfig:
    """
    Check raw integers and build a CMPairConfig.

    Raises:
        ConfigValidationError: Carrying the name of the first violated rule
    """
    for name, d in (("d1", d1), ("d2", d2)):
        if d >= 0:
            raise ConfigValidationError("NotNegative", f"{name} = {d} must be negative")

    if gcd(d1, d2) != 1:
        raise ConfigValidationError(
            "NotCoprime", f"discriminants {d1} and {d2} share the factor {gcd(d1, d2)}"
        )

    for name, d in (("d1", d1), ("d2", d2)):
        if not is_fundamental(d):
            raise ConfigValidationError(
                "NotFundamental", f"{name} = {d} is not a fundamental discriminant"
            )

    if m < 1:
        raise ConfigValidationError("NonpositiveM", f"Hecke index m = {m} must be positive")

    if dB < 1 or not is_squarefree(dB) or len(factorize(dB)) % 2 != 0:
        raise ConfigValidationError(
            "DBNotEvenSquarefree",
            f"dB = {dB} must be a squarefree product of an even number of primes",
        )

    for p, _ in factorize(dB):
        if kronecker(d1, p) != -1 or kronecker(d2, p) != -1:
            raise ConfigValidationError(
                "DBPrimeNotInert",
                f"prime {p} dividing dB is not inert in both Q(sqrt({d1})) and Q(sqrt({d2}))",
                prime=p,
            )

    config = CMPairConfig(d1, d2, dB, m)
    _logger.debug(f"Validated configuration {config.to_dict()}")
    return config


def generator_polynomial(D: int) -> MonicQuadratic:
    """
    Minimal polynomial x^2 - D*x + (D^2 - D)/4 of w = (D + sqrt(D))/2.
    """
    return MonicQuadratic(-D, (D * D - D) // 4)


@dataclass(frozen=True)
class FElement:
    """
    The integer x + y*w of F, where w = (D + sqrt(D))/2.
    """

    x: int
    y: int
    D: int

    @classmethod
    def from_int(cls, n: int, D: int) -> FElement:
        return cls(n, 0, D)

    @classmethod
    def sqrt_d(cls, D: int) -> FElement:
        return cls(-D, 2, D)

    @classmethod
    def companion(cls, a: int, m: int, D: int) -> FElement:
        """
        The integral element (a + m*sqrt(D))/2; requires a = m*D mod 2.
        """
        if (a - m * D) % 2:
            raise CMIntersectError(f"(a + m*sqrt(D))/2 is not integral for a={a}, m={m}, D={D}")
        return cls((a - m * D) // 2, m, D)

    def __mul__(self, other: FElement) -> FElement:
        if other.D != self.D:
            raise CMIntersectError("elements of different quadratic fields")
        yy = self.y * other.y
        return FElement(
            self.x * other.x - yy * (self.D * self.D - self.D) // 4,
            self.x * other.y + other.x * self.y + yy * self.D,
            self.D,
        )

    def __neg__(self) -> FElement:
        return FElement(-self.x, -self.y, self.D)

    def conjugate(self) -> FElement:
        return FElement(self.x + self.y * self.D, -self.y, self.D)

    def trace(self) -> int:
        return 2 * self.x + self.y * self.D

    def norm(self) -> int:
        return self.x * self.x + self.x * self.y * self.D + self.y * self.y * (self.D * self.D - self.D) // 4

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def __str__(self) -> str:
        return f"{self.x} + {self.y}w"


class FSplitting(Enum):
    SPLIT = "Split"
    INERT = "Inert"
    RAMIFIED = "Ramified"


class KSplitting(Enum):
    SPLIT_IN_K = "SplitInK"
    INERT_IN_K = "InertInK"


@dataclass(frozen=True)
class PrimeF:
    """
    A prime of O_F.

    Split primes carry the residue of w modulo the prime (`root`), the
    matching residue of sqrt(D) = 2w - D (`sqrt_d`) and a conjugate flag
    (0 for the smaller root of the generator polynomial mod p).
    """

    p: int
    tag: FSplitting
    k_splitting: KSplitting
    root: int | None = None
    sqrt_d: int | None = None
    conjugate: int = 0

    @property
    def residue_degree(self) -> int:
        return 2 if self.tag is FSplitting.INERT else 1

    @property
    def norm(self) -> int:
        return self.p**self.residue_degree

    def sort_key(self) -> tuple[int, int]:
        return (self.p, self.conjugate)

    def __str__(self) -> str:
        if self.tag is FSplitting.SPLIT:
            return f"P{self.p}[sqrtD={self.sqrt_d}]"
        return f"P{self.p}"


def _k_splitting(p: int, tag: FSplitting, config: CMPairConfig) -> KSplitting:
    if tag is FSplitting.INERT:
        return KSplitting.SPLIT_IN_K

    if config.d1 % p == 0 and config.d2 % p == 0:
        raise InconsistentDataError(f"{p} divides both {config.d1} and {config.d2}")
    d_j = config.d2 if config.d1 % p == 0 else config.d1

    symbol = kronecker(d_j, p)
    if symbol == 0:
        raise InconsistentDataError(f"K/F would be ramified above {p}")
    return KSplitting.SPLIT_IN_K if symbol == 1 else KSplitting.INERT_IN_K


def splitting_in_K(prime: PrimeF, config: CMPairConfig) -> KSplitting:
    """
    Behaviour of a prime of F in the unramified quadratic extension K/F.

    Primes inert in F split in K. At a prime with residue field F_p the
    answer is the Kronecker symbol (d_j|p) for the d_j in {d1, d2} prime to p.
    """
    return _k_splitting(prime.p, prime.tag, config)


@lru_cache(maxsize=4096)
def splitting_in_F(p: int, config: CMPairConfig) -> tuple[PrimeF, ...]:
    """
    The primes of F above the rational prime p.

    Returns:
        tuple: Two split primes (conjugate flags 0 and 1), or a single
        inert or ramified prime
    """
    if not isprime(p):
        raise CMIntersectError(f"{p} is not prime")

    D = config.D
    symbol = kronecker(D, p)
    if symbol == 1:
        k_split = _k_splitting(p, FSplitting.SPLIT, config)
        return tuple(
            PrimeF(p, FSplitting.SPLIT, k_split, root=r, sqrt_d=(2 * r - D) % p, conjugate=i)
            for i, r in enumerate(roots_mod_p(generator_polynomial(D), p))
        )

    tag = FSplitting.INERT if symbol == -1 else FSplitting.RAMIFIED
    return (PrimeF(p, tag, _k_splitting(p, tag, config)),)


def val(e: FElement, prime: PrimeF) -> int:
    """
    Exponent of a prime of F in the principal ideal (e).
    """
    if e.is_zero():
        raise CMIntersectError("valuation of zero is infinite")

    p = prime.p
    norm_exponent = ord_p(e.norm(), p)
    if prime.tag is FSplitting.RAMIFIED:
        return norm_exponent
    if prime.tag is FSplitting.INERT:
        return norm_exponent // 2

    k = norm_exponent + 1
    root = hensel_root(generator_polynomial(e.D), p, k, which=prime.conjugate)
    image = (e.x + e.y * root) % p**k
    if image == 0:
        raise InconsistentDataError(f"valuation of {e} at {prime} exceeds ord_p of its norm")
    return ord_p(image, p)


class FIdeal:
    """
    A fractional ideal of O_F in factored form.

    Args:
        factors (Mapping[PrimeF, int], optional): Prime exponents; zero
            exponents are dropped. Defaults to the unit ideal.
    """

    def __init__(self, factors: Mapping[PrimeF, int] | None = None):
        items = sorted((factors or {}).items(), key=lambda item: item[0].sort_key())
        self._factors: tuple[tuple[PrimeF, int], ...] = tuple(
            (prime, exp) for prime, exp in items if exp != 0
        )

    @classmethod
    def prime(cls, prime: PrimeF) -> FIdeal:
        return cls({prime: 1})

    @classmethod
    def product(cls, ideals: Iterable[FIdeal]) -> FIdeal:
        result = cls()
        for ideal in ideals:
            result = result * ideal
        return result

    def items(self) -> Iterator[tuple[PrimeF, int]]:
        return iter(self._factors)

    @property
    def primes(self) -> tuple[PrimeF, ...]:
        return tuple(prime for prime, _ in self._factors)

    def exponent(self, prime: PrimeF) -> int:
        return dict(self._factors).get(prime, 0)

    def __mul__(self, other: FIdeal) -> FIdeal:
        merged = dict(self._factors)
        for prime, exp in other.items():
            merged[prime] = merged.get(prime, 0) + exp
        return FIdeal(merged)

    def inverse(self) -> FIdeal:
        return FIdeal({prime: -exp for prime, exp in self._factors})

    def __truediv__(self, other: FIdeal) -> FIdeal:
        return self * other.inverse()

    def __pow__(self, k: int) -> FIdeal:
        return FIdeal({prime: k * exp for prime, exp in self._factors})

    def is_integral(self) -> bool:
        return all(exp >= 0 for _, exp in self._factors)

    def norm(self) -> Fraction:
        return prod((Fraction(prime.norm) ** exp for prime, exp in self._factors), start=Fraction(1))

    def at(self, ell: int) -> FIdeal:
        """
        The ell-part of the ideal.
        """
        return FIdeal({prime: exp for prime, exp in self._factors if prime.p == ell})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FIdeal) and self._factors == other._factors

    def __hash__(self) -> int:
        return hash(self._factors)

    def __str__(self) -> str:
        if not self._factors:
            return "(1)"
        return "*".join(str(prime) if exp == 1 else f"{prime}^{exp}" for prime, exp in self._factors)

    def __repr__(self) -> str:
        return f"FIdeal({self})"


@lru_cache(maxsize=65536)
def ideal_of(e: FElement, config: CMPairConfig) -> FIdeal:
    """
    Factor the principal ideal (e).
    """
    if e.is_zero():
        raise CMIntersectError("the zero element generates no fractional ideal")
    if e.D != config.D:
        raise CMIntersectError(f"element of Q(sqrt({e.D})) used with D = {config.D}")

    absolute_norm = abs(e.norm())
    factors: dict[PrimeF, int] = {}
    for p, _ in factorize(absolute_norm):
        for prime in splitting_in_F(p, config):
            if exp := val(e, prime):
                factors[prime] = exp

    ideal = FIdeal(factors)
    if ideal.norm() != absolute_norm:
        raise InconsistentDataError(f"factorization {ideal} of ({e}) has norm {ideal.norm()} != {absolute_norm}")
    return ideal


def different(config: CMPairConfig) -> FIdeal:
    """
    The different of F, i.e. the ideal (sqrt(D)).
    """
    return ideal_of(FElement.sqrt_d(config.D), config)


def rho_local(prime: PrimeF, k: int) -> int:
    """
    Number of ideals of O_K above `prime` with relative norm prime^k.
    """
    if k < 0:
        return 0
    if prime.k_splitting is KSplitting.SPLIT_IN_K:
        return k + 1
    return 1 if k % 2 == 0 else 0


def rho(ideal: FIdeal) -> int:
    """
    Number of integral ideals of O_K whose relative norm to F is `ideal`.
    """
    if not ideal.is_integral():
        return 0
    return prod(rho_local(prime, exp) for prime, exp in ideal.items())


def rho_at(ideal: FIdeal, ell: int) -> int:
    """
    The local factor rho_ell, so that rho = prod over ell of rho_at.
    """
    return rho(ideal.at(ell))

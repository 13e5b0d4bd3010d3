"""
Exact number-theoretic kernel: Kronecker symbols, factorization, Hensel
lifting of quadratic roots and arithmetic in F_{p^2}.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from sympy import factorint, isprime
from sympy.functions.combinatorial.numbers import jacobi_symbol
from sympy.ntheory import multiplicity, sqrt_mod

from ._errors import CMIntersectError, NonHenselianError

_logger = logging.getLogger(__name__)


def kronecker(a: int, n: int) -> int:
    """
    Kronecker symbol (a|n), extending the Jacobi symbol to every nonzero n.

    Args:
        a (int): Numerator
        n (int): Denominator, must be nonzero

    Returns:
        int: One of -1, 0, 1

    Raises:
        CMIntersectError: If n is zero
    """
    if n == 0:
        raise CMIntersectError("Kronecker symbol (a|0) is undefined")

    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result

    twos = multiplicity(2, n)
    if twos:
        if a % 2 == 0:
            return 0
        # (a|2) = -1 iff a = +-3 mod 8
        if twos % 2 == 1 and a % 8 in (3, 5):
            result = -result
        n >>= twos

    if n == 1:
        return result
    return result * int(jacobi_symbol(a % n, n))


def ord_p(n: int, p: int) -> int:
    """
    Exponent of the prime p in the nonzero integer n.
    """
    if n == 0:
        raise CMIntersectError("valuation of zero is infinite")
    return int(multiplicity(p, abs(n)))


def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """
    Factor a positive integer.

    sympy runs trial division first, then Pollard rho with a fixed seed
    sequence, certifying each factor with a primality test that is
    deterministic below 2^64.

    Args:
        n (int): Integer >= 1

    Returns:
        tuple: (prime, exponent) pairs with strictly increasing primes
    """
    if n < 1:
        raise CMIntersectError(f"can only factor positive integers, got {n}")
    return tuple(sorted((int(p), int(e)) for p, e in factorint(n).items()))


class MonicQuadratic(NamedTuple):
    """
    The polynomial x^2 + b*x + c.
    """

    b: int
    c: int

    def __call__(self, x: int) -> int:
        return x * x + self.b * x + self.c

    def derivative(self, x: int) -> int:
        return 2 * x + self.b

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.c


def roots_mod_p(f: MonicQuadratic, p: int) -> list[int]:
    """
    All roots of f in [0, p - 1], ascending.
    """
    if p == 2:
        return [r for r in (0, 1) if f(r) % 2 == 0]

    half = pow(2, -1, p)
    square_roots = sqrt_mod(f.discriminant % p, p, all_roots=True) or []
    return sorted({(-f.b + s) * half % p for s in square_roots})


def hensel_root(f: MonicQuadratic, p: int, k: int, which: int = 0) -> int:
    """
    Lift a simple root of f modulo p to a root modulo p^k.

    The canonical root (which=0) is the smaller of the two roots in [0, p - 1];
    which=1 lifts the other one.

    Args:
        f (MonicQuadratic): Polynomial to solve
        p (int): Prime
        k (int): Precision exponent, >= 1
        which (int, optional): Root selector. Defaults to 0.

    Returns:
        int: c in [0, p^k - 1] with f(c) = 0 mod p^k

    Raises:
        NonHenselianError: If f has no simple root modulo p
    """
    if k < 1:
        raise CMIntersectError(f"precision exponent must be positive, got {k}")

    roots = roots_mod_p(f, p)
    if not roots or any(f.derivative(r) % p == 0 for r in roots):
        raise NonHenselianError(
            f"non-Henselian input: x^2 + {f.b}x + {f.c} has no simple root mod {p}"
        )
    if which not in range(len(roots)):
        raise CMIntersectError(f"root selector {which} out of range for mod {p} roots {roots}")

    root = roots[which]
    precision = 1
    while precision < k:
        precision = min(2 * precision, k)
        modulus = p**precision
        root = (root - f(root) * pow(f.derivative(root), -1, modulus)) % modulus

    return root


@lru_cache(maxsize=None)
def smallest_nonresidue(p: int) -> int:
    """
    Smallest positive quadratic nonresidue modulo an odd prime p.

    F_4 is presented with the modulus x^2 + x + 1 instead, so for p = 2 the
    returned constant 1 only tags the presentation.
    """
    if not isprime(p):
        raise CMIntersectError(f"{p} is not prime")
    if p == 2:
        return 1
    n = 2
    while kronecker(n, p) != -1:
        n += 1
    return n


@dataclass(frozen=True)
class Fp2Element:
    """
    The element c0 + c1*t of F_{p^2}.

    For odd p, t^2 = n where n is a quadratic nonresidue mod p. For p = 2,
    t^2 = t + 1.
    """

    p: int
    n: int
    c0: int
    c1: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "c0", self.c0 % self.p)
        object.__setattr__(self, "c1", self.c1 % self.p)

    @classmethod
    def from_base(cls, p: int, value: int) -> Fp2Element:
        return cls(p, smallest_nonresidue(p), value, 0)

    @classmethod
    def generator(cls, p: int) -> Fp2Element:
        return cls(p, smallest_nonresidue(p), 0, 1)

    def _coerce(self, other: Fp2Element | int) -> Fp2Element:
        if isinstance(other, int):
            return Fp2Element(self.p, self.n, other, 0)
        if (other.p, other.n) != (self.p, self.n):
            raise CMIntersectError(
                f"cannot combine elements of F_{self.p}^2 and F_{other.p}^2"
            )
        return other

    def __add__(self, other: Fp2Element | int) -> Fp2Element:
        o = self._coerce(other)
        return Fp2Element(self.p, self.n, self.c0 + o.c0, self.c1 + o.c1)

    __radd__ = __add__

    def __neg__(self) -> Fp2Element:
        return Fp2Element(self.p, self.n, -self.c0, -self.c1)

    def __sub__(self, other: Fp2Element | int) -> Fp2Element:
        return self + (-self._coerce(other))

    def __rsub__(self, other: int) -> Fp2Element:
        return self._coerce(other) - self

    def __mul__(self, other: Fp2Element | int) -> Fp2Element:
        o = self._coerce(other)
        if self.p == 2:
            return Fp2Element(
                2,
                self.n,
                self.c0 * o.c0 + self.c1 * o.c1,
                self.c0 * o.c1 + self.c1 * o.c0 + self.c1 * o.c1,
            )
        return Fp2Element(
            self.p,
            self.n,
            self.c0 * o.c0 + self.n * self.c1 * o.c1,
            self.c0 * o.c1 + self.c1 * o.c0,
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> Fp2Element:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Fp2Element.from_base(self.p, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def frobenius(self) -> Fp2Element:
        """
        The map x -> x^p.
        """
        if self.p == 2:
            return Fp2Element(2, self.n, self.c0 + self.c1, self.c1)
        return Fp2Element(self.p, self.n, self.c0, -self.c1)

    def norm(self) -> int:
        return (self * self.frobenius()).c0

    def inverse(self) -> Fp2Element:
        if self.is_zero():
            raise ZeroDivisionError(f"zero has no inverse in F_{self.p}^2")
        return self.frobenius() * pow(self.norm(), -1, self.p)

    def is_zero(self) -> bool:
        return self.c0 == 0 and self.c1 == 0

    def in_base_field(self) -> bool:
        return self.c1 == 0

    def __repr__(self) -> str:
        return f"({self.c0} + {self.c1}t mod {self.p})"


def fp2_sqrt(d: int, p: int) -> Fp2Element:
    """
    Square root of a quadratic nonresidue d in F_{p^2}, p odd.

    The root is c1*t with c1^2 = d/n; the smaller of c1, p - c1 is returned,
    its Frobenius conjugate is the other root.

    Raises:
        CMIntersectError: If p = 2 or d is a square (or zero) mod p
    """
    if p == 2:
        raise CMIntersectError(
            "every element of F_2 is a square; embeddings at 2 use roots of x^2 + x + 1"
        )
    if d % p == 0 or kronecker(d, p) != -1:
        raise CMIntersectError(f"{d} is a square mod {p}, its root lies in F_{p}")

    n = smallest_nonresidue(p)
    candidates = sqrt_mod(d * pow(n, -1, p) % p, p, all_roots=True)
    return Fp2Element(p, n, 0, min(candidates))

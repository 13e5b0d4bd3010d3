"""
CM data: totally positive trace-m elements of the inverse different, and the
ring homomorphisms theta: O_K -> O_B/m_B together with their kernels.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product
from math import isqrt

from ._arith import Fp2Element, fp2_sqrt
from ._errors import CMIntersectError, InconsistentDataError
from ._fields import CMPairConfig, FElement, FIdeal, FSplitting, PrimeF, splitting_in_F

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlphaElement:
    """
    alpha = (a + m*sqrt(D)) / (2*sqrt(D)), a totally positive element of
    trace m in the inverse different, stored through its companion
    e = (a + m*sqrt(D))/2 which satisfies (alpha)*D_F = (e).
    """

    a: int
    m: int
    companion: FElement

    @property
    def D(self) -> int:
        return self.companion.D

    def companion_norm(self) -> int:
        """
        |N(e)| = (m^2 D - a^2)/4.
        """
        return (self.m * self.m * self.D - self.a * self.a) // 4


def enumerate_alphas(config: CMPairConfig) -> tuple[AlphaElement, ...]:
    """
    All AlphaElements of trace m: a = m*D mod 2 and a^2 < m^2*D, ascending in a.
    """
    D, m = config.D, config.m
    bound = isqrt(m * m * D)
    if bound * bound == m * m * D:
        bound -= 1

    alphas = tuple(
        AlphaElement(a, m, FElement.companion(a, m, D))
        for a in range(-bound, bound + 1)
        if (a - m * D) % 2 == 0
    )
    _logger.debug(f"Enumerated {len(alphas)} elements of trace {m} for D = {D}")
    return alphas


def embedding_roots(d: int, p: int) -> tuple[Fp2Element, Fp2Element]:
    """
    The two images in F_{p^2} of the generator of O_{K} for K = Q(sqrt(d)),
    with p inert in K.

    For odd p these are the square roots of d (canonical root first). At
    p = 2 the generator (1 + sqrt(d))/2 is sent to a root of x^2 + x + 1.
    """
    if p == 2:
        t = Fp2Element.generator(2)
        return t, t.frobenius()
    s = fp2_sqrt(d, p)
    return s, -s


def _canonical_root(s: Fp2Element) -> Fp2Element:
    return min(s, s.frobenius(), key=lambda x: (x.c1, x.c0))


@dataclass(frozen=True)
class LocalTheta:
    """
    The component at p of theta: images s1, s2 of the generators of
    O_{K1}, O_{K2} in F_{p^2}, and the prime of F in its kernel.
    """

    p: int
    s1: Fp2Element
    s2: Fp2Element
    kernel: PrimeF

    def signs(self) -> tuple[int, int]:
        """
        0 where the canonical root was chosen, 1 for its conjugate.
        """
        return (int(self.s1 != _canonical_root(self.s1)), int(self.s2 != _canonical_root(self.s2)))


@dataclass(frozen=True)
class ThetaHom:
    """
    A ring homomorphism O_K -> O_B/m_B = prod over p | dB of F_{p^2}.
    """

    index: int
    components: tuple[LocalTheta, ...]

    def kernel_prime(self, p: int) -> PrimeF:
        for local in self.components:
            if local.p == p:
                return local.kernel
        raise CMIntersectError(f"theta has no component at {p}")

    def __str__(self) -> str:
        if not self.components:
            return "theta0"
        return "theta" + "".join(
            f"[{local.p}:{local.signs()[0]}{local.signs()[1]}]" for local in self.components
        )


def _theta_of_w(p: int, s1: Fp2Element, s2: Fp2Element, D: int) -> Fp2Element:
    if p == 2:
        # w = (D + 1)/2 + 2*u1*u2 - u1 - u2 with u_i = (1 + sqrt(d_i))/2
        return (D + 1) // 2 + 2 * (s1 * s2) - s1 - s2
    return (s1 * s2 + D) * pow(2, -1, p)


def kernel_prime(p: int, s1: Fp2Element, s2: Fp2Element, config: CMPairConfig) -> PrimeF:
    """
    The split prime of F above p contained in the kernel of theta.
    """
    image = _theta_of_w(p, s1, s2, config.D)
    if not image.in_base_field():
        raise InconsistentDataError(f"theta(w) = {image} does not lie in F_{p}")

    for prime in splitting_in_F(p, config):
        if prime.tag is FSplitting.SPLIT and prime.root == image.c0:
            return prime
    raise InconsistentDataError(f"theta(w) = {image.c0} matches no prime of F above {p}")


def enumerate_thetas(config: CMPairConfig) -> tuple[ThetaHom, ...]:
    """
    All 4^r homomorphisms, r = number of primes dividing dB, ordered
    lexicographically by (p, s1 choice, s2 choice).
    """
    per_prime: list[list[LocalTheta]] = []
    for p in config.db_primes:
        options = []
        for s1, s2 in product(embedding_roots(config.d1, p), embedding_roots(config.d2, p)):
            options.append(LocalTheta(p, s1, s2, kernel_prime(p, s1, s2, config)))
        per_prime.append(options)

    thetas = tuple(
        ThetaHom(index, tuple(components))
        for index, components in enumerate(product(*per_prime))
    )
    _logger.debug(f"Enumerated {len(thetas)} homomorphisms O_K -> O_B/m_B for dB = {config.dB}")
    return thetas


def a_theta(theta: ThetaHom, config: CMPairConfig) -> FIdeal:
    """
    The ideal ker(theta) intersected with O_F.
    """
    return FIdeal.product(
        FIdeal.prime(kernel_prime(local.p, local.s1, local.s2, config))
        for local in theta.components
    )


def theta_kernel_contains(theta: ThetaHom, prime: PrimeF) -> bool:
    """
    Whether the prime of K above `prime` (a prime over some p | dB) divides ker(theta).
    """
    if prime.p not in {local.p for local in theta.components}:
        raise CMIntersectError(f"{prime} does not lie over a prime dividing dB")
    return theta.kernel_prime(prime.p) == prime

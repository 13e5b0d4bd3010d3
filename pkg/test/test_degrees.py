import os
import sys
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Optional

import pytest
from sympy import primerange

sys.path.insert(0, os.path.abspath(os.path.dirname(__file__) + "/../"))

from cm_intersect import CMIntersectError  # noqa: E402
from cm_intersect._arith import kronecker  # noqa: E402
from cm_intersect._cmdata import (  # noqa: E402
    a_theta,
    enumerate_alphas,
    enumerate_thetas,
    theta_kernel_contains,
)
from cm_intersect._degrees import (  # noqa: E402
    ArithDegree,
    LengthBranch,
    degree_term,
    degree_X,
    degree_X_classical,
    diff_set,
    eisenstein_coeff,
    local_length,
    orbital_integral,
    orbital_integrals,
    orbital_product,
)
from cm_intersect._fields import (  # noqa: E402
    FIdeal,
    KSplitting,
    ideal_of,
    is_fundamental,
    rho,
    splitting_in_F,
    validate,
)

FUNDAMENTAL = [d for d in range(-40, 0) if is_fundamental(d)]
PAIRS = [(d1, d2) for d1, d2 in combinations(FUNDAMENTAL, 2) if gcd(d1, d2) == 1]


def _two_prime_db(d1: int, d2: int) -> Optional[int]:
    inert = [p for p in primerange(2, 60) if kronecker(d1, p) == -1 and kronecker(d2, p) == -1]
    return inert[0] * inert[1] if len(inert) >= 2 else None


def _alpha(config, a):
    return next(alpha for alpha in enumerate_alphas(config) if alpha.a == a)


@pytest.fixture
def config_12():
    return validate(-3, -4)


@pytest.fixture
def config_28():
    return validate(-7, -4)


class TestArithDegree:
    def test_algebra(self):
        x = ArithDegree({2: 1, 3: Fraction(1, 2)})
        y = ArithDegree({3: Fraction(1, 2), 7: 0})
        assert (x + y).terms() == [(2, Fraction(1)), (3, Fraction(1))]
        assert (x + y).support == (2, 3)
        assert (2 * x).coefficient(3) == 1
        assert ArithDegree.zero().is_zero()
        assert ArithDegree.sum([x, y, ArithDegree.zero()]) == x + y
        assert not x.is_integral()
        assert (2 * x).is_integral()

    def test_serialization(self):
        x = ArithDegree({3: Fraction(5, 2), 2: 2})
        assert x.to_dict() == {"2": "2", "3": "5/2"}
        assert ArithDegree.from_dict(x.to_dict()) == x

    def test_log_value(self):
        assert ArithDegree({2: 2, 3: 1}).log_value() == pytest.approx(2.484906649788)
        assert ArithDegree.zero().log_value() == 0

    def test_negative_coefficients(self):
        with pytest.raises(CMIntersectError, match="negative"):
            ArithDegree({2: 1, 3: Fraction(-1, 2)})
        with pytest.raises(CMIntersectError, match="negative"):
            -1 * ArithDegree({2: 1})
        with pytest.raises(CMIntersectError):
            ArithDegree.from_dict({"5": "-3"})
        assert ArithDegree({2: 0}).is_zero()
        assert (0 * ArithDegree({2: 1})).is_zero()


class TestDiffSet:
    def test_examples(self, config_12, config_28):
        (theta,) = enumerate_thetas(config_12)
        assert [str(q) for q in diff_set(_alpha(config_12, 0), theta, config_12)] == ["P3"]
        assert [str(q) for q in diff_set(_alpha(config_12, 2), theta, config_12)] == ["P2"]

        (theta,) = enumerate_thetas(config_28)
        assert [str(q) for q in diff_set(_alpha(config_28, 2), theta, config_28)] == [
            "P3[sqrtD=1]"
        ]


class TestLocalLength:
    def test_examples(self, config_12, config_28):
        (p3,) = splitting_in_F(3, config_12)
        alpha = _alpha(config_12, 0)
        assert local_length(alpha, p3, LengthBranch.NU, config_12) == 1
        assert local_length(alpha, p3, LengthBranch.NU_PRIME, config_12) == 0

        q3 = splitting_in_F(3, config_28)[1]
        assert local_length(_alpha(config_28, 2), q3, LengthBranch.NU, config_28) == 1

    def test_nu_prime_trivial(self):
        config = validate(-3, -4, dB=253)
        prime = splitting_in_F(11, config)[0]
        assert local_length(_alpha(config, 0), prime, LengthBranch.NU_PRIME, config) == 0


class TestOrbitalIntegrals:
    def test_examples(self, config_12, config_28):
        (theta,) = enumerate_thetas(config_12)
        (p3,) = splitting_in_F(3, config_12)
        alpha = _alpha(config_12, 0)
        assert orbital_integral(3, alpha, theta, p3, config_12) == 1
        assert orbital_integral(2, alpha, theta, p3, config_12) == 1

        (theta,) = enumerate_thetas(config_28)
        q3 = splitting_in_F(3, config_28)[1]
        alpha = _alpha(config_28, 2)
        assert orbital_integral(2, alpha, theta, q3, config_28) == 2
        assert orbital_integrals(alpha, theta, q3, config_28) == {2: 2, 3: 1}

    def test_wrong_diff_prime(self, config_28):
        (theta,) = enumerate_thetas(config_28)
        (q2,) = splitting_in_F(2, config_28)
        with pytest.raises(CMIntersectError):
            orbital_integral(2, _alpha(config_28, 2), theta, q2, config_28)


class TestDegree:
    @pytest.mark.parametrize(
        "d1, d2, a, expected",
        [
            (-3, -4, 0, {3: 1}),
            (-3, -4, 2, {2: 1}),
            (-3, -4, -2, {2: 1}),
            (-7, -4, 0, {7: 1}),
            (-7, -4, 2, {3: 2}),
            (-7, -4, -4, {3: 1}),
        ],
    )
    def test_examples(self, d1, d2, a, expected):
        config = validate(d1, d2)
        (theta,) = enumerate_thetas(config)
        alpha = _alpha(config, a)
        assert degree_X(alpha, theta, config) == ArithDegree(expected)
        assert degree_X_classical(alpha, config) == ArithDegree(expected)

    def test_term_details(self, config_28):
        (theta,) = enumerate_thetas(config_28)
        term = degree_term(_alpha(config_28, 2), theta, config_28)
        assert term.length == 1
        assert term.count == 2
        assert [str(q) for q in term.diff] == ["P3[sqrtD=1]"]

    def test_eisenstein(self, config_12, config_28):
        assert eisenstein_coeff(_alpha(config_12, 0), config_12) == ArithDegree({3: 4})
        assert eisenstein_coeff(_alpha(config_28, 2), config_28) == ArithDegree({3: 8})

    def test_classical_needs_split_algebra(self):
        config = validate(-3, -4, dB=253)
        with pytest.raises(CMIntersectError):
            degree_X_classical(_alpha(config, 0), config)

    def _theta_with_kernels(self, config, kernels):
        return next(
            theta
            for theta in enumerate_thetas(config)
            if all(theta.kernel_prime(q.p) == q for q in kernels)
        )

    def test_kernel_branch(self):
        # e = 2 + 5*sqrt(7), N(e) = -171 = -3^2 * 19, and 3 does not divide e
        config = validate(-7, -4, dB=57, m=5)
        alpha = _alpha(config, 4)
        ideal = ideal_of(alpha.companion, config)
        (p3,) = [q for q in ideal.primes if q.p == 3]
        (q19,) = [q for q in ideal.primes if q.p == 19]
        assert (ideal.exponent(p3), ideal.exponent(q19)) == (2, 1)

        theta = self._theta_with_kernels(config, [p3, q19])
        term = degree_term(alpha, theta, config)
        assert term.diff == (p3,)
        assert theta_kernel_contains(theta, p3)
        assert local_length(alpha, p3, LengthBranch.NU_PRIME, config) == 1
        assert (term.length, term.count) == (1, 1)
        assert term.degree == ArithDegree({3: 1})

    def test_non_kernel_branch(self):
        # e = 9 + 6*sqrt(7) = 3 * (3 + 2*sqrt(7)), N(e) = -171 with 3 dividing e
        config = validate(-7, -4, dB=57, m=6)
        alpha = _alpha(config, 18)
        ideal = ideal_of(alpha.companion, config)
        p3, p3_bar = splitting_in_F(3, config)
        (q19,) = [q for q in ideal.primes if q.p == 19]
        assert (ideal.exponent(p3), ideal.exponent(p3_bar), ideal.exponent(q19)) == (1, 1, 1)

        theta = self._theta_with_kernels(config, [p3_bar, q19])
        term = degree_term(alpha, theta, config)
        assert term.diff == (p3,)
        assert not theta_kernel_contains(theta, p3)
        assert (term.length, term.count) == (1, 1)
        assert term.degree == ArithDegree({3: 1})

        # the same alpha with the kernel at p3 moves Diff to p3_bar
        theta = self._theta_with_kernels(config, [p3, q19])
        assert degree_term(alpha, theta, config).diff == (p3_bar,)

    def test_quaternionic_terms(self):
        config = validate(-3, -4, dB=253)
        thetas = enumerate_thetas(config)
        for alpha in enumerate_alphas(config):
            for theta in thetas:
                term = degree_term(alpha, theta, config)
                assert term.degree.is_integral()
                if len(term.diff) == 1:
                    assert term.degree.support in ((), (term.diff[0].p,))


def _check_config(config) -> None:
    thetas = enumerate_thetas(config)
    for alpha in enumerate_alphas(config):
        for theta in thetas:
            diff = diff_set(alpha, theta, config)
            assert len(diff) % 2 == 1
            assert all(q.k_splitting is KSplitting.INERT_IN_K for q in diff)

            term = degree_term(alpha, theta, config)
            assert term.degree.is_integral()
            if len(diff) != 1:
                assert term.degree.is_zero()
                continue

            (prime,) = diff
            expected_count = rho(
                ideal_of(alpha.companion, config) / a_theta(theta, config) / FIdeal.prime(prime)
            )
            assert term.count == expected_count
            assert orbital_product(alpha, theta, prime, config) == expected_count

        if config.dB == 1:
            (theta,) = thetas
            classical = degree_X_classical(alpha, config)
            assert degree_X(alpha, theta, config) == classical
            if config.m == 1:
                assert all(4 * p <= config.D for p in classical.support)


@pytest.mark.slow
class TestProperties:
    @pytest.mark.parametrize("d1, d2", PAIRS)
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_split_algebra(self, d1, d2, m):
        _check_config(validate(d1, d2, m=m))

    @pytest.mark.parametrize("d1, d2", PAIRS)
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_quaternion_algebra(self, d1, d2, m):
        dB = _two_prime_db(d1, d2)
        if dB is None:
            pytest.skip(f"no two primes below 60 inert in both fields for ({d1}, {d2})")
        _check_config(validate(d1, d2, dB=dB, m=m))

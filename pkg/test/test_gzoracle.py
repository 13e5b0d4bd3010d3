import cmath
import math
import os
import sys
from fractions import Fraction
from itertools import combinations
from math import gcd

import mpmath
import pytest

sys.path.insert(0, os.path.abspath(os.path.dirname(__file__) + "/../"))

from cm_intersect import (  # noqa: E402
    CMIntersectError,
    ConfigValidationError,
    PrecisionExhaustedError,
)
from cm_intersect._fields import is_fundamental  # noqa: E402
from cm_intersect._gzoracle import (  # noqa: E402
    ReducedForm,
    brute_force_class_number,
    class_number,
    gz_compare,
    gz_square,
    initial_precision,
    j_invariant,
    reduced_forms,
)

FUNDAMENTAL = [d for d in range(-40, 0) if is_fundamental(d)]
PAIRS = [(d1, d2) for d1, d2 in combinations(FUNDAMENTAL, 2) if gcd(d1, d2) == 1]


class TestReducedForms:
    @pytest.mark.parametrize(
        "d, expected",
        [
            (-3, [(1, 1, 1)]),
            (-4, [(1, 0, 1)]),
            (-23, [(1, 1, 6), (2, -1, 3), (2, 1, 3)]),
            (-163, [(1, 1, 41)]),
        ],
    )
    def test_examples(self, d, expected):
        forms = reduced_forms(d)
        assert forms == [ReducedForm(*form) for form in expected]
        assert all(form.discriminant == d for form in forms)

    def test_class_numbers(self):
        assert class_number(-71) == 7
        assert class_number(-199) == 9
        for d in range(-200, 0):
            if is_fundamental(d):
                assert class_number(d) == brute_force_class_number(d)

    @pytest.mark.parametrize("d", [-16, -12, 5, 0])
    def test_invalid(self, d):
        with pytest.raises(ConfigValidationError):
            reduced_forms(d)


class TestJInvariant:
    def test_special_values(self):
        assert abs(ReducedForm(1, 0, 1).j_invariant(100) - 1728) < 1e-20
        assert abs(ReducedForm(1, 1, 1).j_invariant(100)) < 1e-20
        assert abs(ReducedForm(1, 1, 41).j_invariant(200) + 640320**3) < 1e-20

    @pytest.mark.parametrize("tau", [0.3 + 1.1j, -0.45 + 0.9j, 0.1 + 2.5j])
    def test_against_kleinj(self, tau):
        value = complex(j_invariant(tau, 120))
        with mpmath.workdps(40):
            expected = complex(1728 * mpmath.kleinj(mpmath.mpc(tau)))
        assert abs(value - expected) <= 1e-12 * abs(expected)

    def test_doubled_precision(self):
        form = ReducedForm(2, 1, 3)
        low = form.j_invariant(80)
        high = form.j_invariant(160)
        assert abs(complex(low) - complex(high)) <= 2.0**-40

    def test_translation(self):
        tau = 0.2 + 1.3j
        assert complex(j_invariant(tau + 1, 100)) == pytest.approx(complex(j_invariant(tau, 100)))

    @pytest.mark.parametrize("phi", [math.pi / 3 + 0.05, 1.3, math.pi / 2, 2.0])
    def test_inversion_on_unit_circle(self, phi):
        tau = cmath.exp(1j * phi)
        value = complex(j_invariant(tau, 100))
        inverted = complex(j_invariant(-1 / tau, 100))
        assert abs(value - inverted) <= 1e-12 * max(1.0, abs(value))
        assert abs(value.imag) <= 1e-12 * max(1.0, abs(value))

    def test_below_fundamental_domain(self):
        with pytest.raises(CMIntersectError):
            j_invariant(0.1 + 0.5j, 64)

    def test_nonpositive_precision(self):
        with pytest.raises(CMIntersectError):
            j_invariant(1j, 0)


class TestGZSquare:
    @pytest.mark.parametrize(
        "d1, d2, expected",
        [(-3, -4, 12), (-7, -4, 5103), (-3, -163, 640320**2)],
    )
    def test_values(self, d1, d2, expected):
        assert gz_square(d1, d2) == expected

    def test_precision_independence(self):
        prec = initial_precision(-7, -4)
        assert gz_square(-7, -4, prec=2 * prec) == gz_square(-7, -4)

    def test_initial_precision(self):
        assert initial_precision(-3, -4) > 64
        assert initial_precision(-3, -163) > initial_precision(-3, -4)

    def test_precision_exhausted(self):
        with pytest.raises(PrecisionExhaustedError, match="precision exhausted"):
            gz_square(-3, -4, prec=64, max_prec=32)

    def test_env_cap(self, monkeypatch):
        monkeypatch.setenv("CM_INTERSECT_MAX_PREC_BITS", "32")
        with pytest.raises(PrecisionExhaustedError):
            gz_square(-7, -4, prec=64)

    def test_invalid_pair(self):
        with pytest.raises(ConfigValidationError):
            gz_square(-3, -12)


class TestGZCompare:
    def test_agreement(self):
        comparison = gz_compare(-7, -4)
        assert comparison.passed
        assert comparison.j_squared == 5103
        assert comparison.oracle == {3: 6, 7: 1}
        assert comparison.ratios == {3: Fraction(1), 7: Fraction(1)}

        data = comparison.to_dict()
        assert data["j_squared"] == "5103"
        assert data["formula_coeffs"] == {"3": "6", "7": "1"}
        assert data["pass"] is True

    def test_heegner_pair(self):
        comparison = gz_compare(-3, -163)
        assert comparison.passed
        assert comparison.oracle == {2: 12, 3: 2, 5: 2, 23: 2, 29: 2}


@pytest.mark.slow
class TestGZSweep:
    @pytest.mark.parametrize("d1, d2", PAIRS)
    def test_formula_matches_oracle(self, d1, d2):
        comparison = gz_compare(d1, d2, threads=2)
        assert comparison.passed, comparison.to_dict()
        assert all(ratio == 1 for ratio in comparison.ratios.values())

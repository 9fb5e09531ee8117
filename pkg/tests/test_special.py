import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from cefacies.special import digamma

EULER_GAMMA = 0.5772156649015329


def test_psi_one_is_minus_euler_gamma():
    assert abs(digamma(1.0) + EULER_GAMMA) < 1e-10


def test_psi_two():
    assert abs(digamma(2.0) - 0.42278433509846714) < 1e-10


def test_psi_half():
    assert abs(digamma(0.5) - (-EULER_GAMMA - 2 * math.log(2))) < 1e-10
    assert abs(digamma(0.5) + 1.9635100260214235) < 1e-10


@pytest.mark.parametrize("x", [0.1, 0.5, 1, 2, 10, 100])
def test_recurrence(x):
    assert abs(digamma(x + 1) - digamma(x) - 1 / x) < 1e-10


@pytest.mark.parametrize("x", [1e-3, 0.3, 1.5, 5.999, 6.0, 6.001, 37.2, 1e4, 1e12])
def test_matches_mpmath(x):
    assert abs(digamma(x) - float(mpmath.digamma(x))) < 1e-10


@pytest.mark.parametrize("x", [1e-9, 1e-6])
def test_tiny_argument_relative_accuracy(x):
    # |psi(x)| ~ 1/x here, so only relative accuracy is representable
    ref = float(mpmath.digamma(x))
    assert abs(digamma(x) - ref) <= 1e-14 * abs(ref)


@given(st.floats(min_value=1e-3, max_value=1e6))
def test_matches_mpmath_property(x):
    ref = float(mpmath.digamma(x))
    assert abs(digamma(x) - ref) < 1e-10


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, float("nan"), float("inf")])
def test_rejects_non_positive(x):
    with pytest.raises(ValueError):
        digamma(x)

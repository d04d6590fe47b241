import os
import subprocess
import sys
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mpf

from canard.errors import ConfigError
from canard.precision import big, set_precision, tiny, to_decimal, ulp, working_precision


def test_working_precision_restores_previous_setting():
    before = mpmath.mp.dps
    with working_precision(40) as digits:
        assert digits == 40
        assert mpmath.mp.dps == 40
    assert mpmath.mp.dps == before


def test_working_precision_rejects_too_few_digits():
    with pytest.raises(ConfigError):
        with working_precision(5):
            pass


@pytest.mark.parametrize("text, num, den", [
    ("0.1", 1, 10),
    ("-4/27", -4, 27),
    ("1e-3", 1, 1000),
    (" 2 ", 2, 1),
])
def test_big_parses_decimal_strings_and_ratios(text, num, den):
    assert big(text) == mpf(num) / den


def test_big_from_decimal_string_avoids_binary_float():
    assert big("0.1") != mpf(0.1)
    assert abs(big("0.1") * 10 - 1) <= ulp(1)


def test_big_accepts_fractions():
    assert big(Fraction(2, 3)) == mpf(2) / 3


def test_big_rejects_garbage():
    with pytest.raises((ConfigError, ValueError)):
        big("not-a-number")


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=-10**40, max_value=10**40), st.integers(min_value=1, max_value=10**30),
       st.integers(min_value=-60, max_value=60))
def test_to_decimal_round_trips_exactly(num, den, exp10):
    with mpmath.workdps(120):
        x = mpf(num) / den * mpf(10) ** exp10
        assert big(to_decimal(x)) == x


def test_ulp_and_tiny_scale_with_precision():
    with working_precision(50):
        coarse = ulp(1)
        coarse_tiny = tiny()
    with working_precision(120):
        assert ulp(1) < coarse
        assert tiny() < coarse_tiny
    assert ulp(0) > 0


def test_set_precision_validates():
    before = mpmath.mp.dps
    try:
        assert set_precision(60) == 60
        with pytest.raises(ConfigError):
            set_precision(3)
    finally:
        mpmath.mp.dps = before


def test_environment_variable_sets_default_precision():
    code = "import canard.precision as p; print(p.DEFAULT_PRECISION)"
    env = dict(os.environ, CANARD_PRECISION="77")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "77"

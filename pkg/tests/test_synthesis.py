import json
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mpf

from canard.errors import ConfigError, SynthesisError
from canard.pws import reference_system
from canard.sdi import sdi_expansion
from canard.synthesis import (
    REFERENCE_PSI_COEFFICIENTS,
    SynthesisSpec,
    build_target_polynomial,
    compute_C2k,
    compute_J,
    construct_psi,
    count_simple_roots,
    golden_check,
    synthesize,
    tune_delta,
)


@pytest.fixture(scope="module")
def k4():
    with mpmath.workdps(120):
        return synthesize(SynthesisSpec(4, "1e-3"))


@pytest.mark.parametrize("k, expected", [
    (2, [-1, 1]),
    (3, [2, -3, 1]),
    (4, [-6, 11, -6, 1]),
])
def test_target_polynomial_examples(k, expected):
    assert build_target_polynomial(k) == expected


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 12))
def test_target_polynomial_vanishes_at_integers(k):
    coeffs = build_target_polynomial(k)
    value = lambda x: sum(c * x**j for j, c in enumerate(coeffs))  # noqa: E731
    assert all(value(i) == 0 for i in range(1, k))
    assert value(k) != 0
    assert coeffs[-1] == 1


def test_slope_coefficients(two_fold):
    assert compute_C2k(two_fold, 1, exact=True) == -4
    assert compute_C2k(two_fold, 2, exact=True) == Fraction(-8, 81)
    with pytest.raises(ConfigError):
        compute_C2k(two_fold, 0)


@pytest.mark.parametrize("i", [1, 2, 3])
def test_odd_derivative_is_affine_in_top_jet_entry(two_fold, arctan, i):
    y2c = 1 / mpmath.sqrt(3)
    jet = arctan.derivatives(y2c, 2 * i)

    def top(value):
        trial = jet[: 2 * i] + [mpf(value)]
        return sdi_expansion(two_fold, None, 2 * i + 1, jet=trial, y2c=y2c).integral.derivative_at_center(2 * i + 1)

    a, b, c = top(0), top(1), top(3)
    slope = compute_C2k(two_fold, i) / jet[1] ** (2 * i - 1)
    assert abs((b - a) - slope) < mpf(10) ** -90 * abs(slope)
    assert abs((c - a) - 3 * slope) < mpf(10) ** -90 * abs(slope)
    assert abs(compute_J(two_fold, jet, i, y2c) - a) < mpf(10) ** -90 * max(1, abs(a))


def test_offset_ignores_higher_jet_entries(two_fold, arctan):
    y2c = 1 / mpmath.sqrt(3)
    jet = arctan.derivatives(y2c, 8)
    altered = jet[:4] + [mpf(17), mpf(-5), mpf(2)]
    assert compute_J(two_fold, jet, 2, y2c) == compute_J(two_fold, altered, 2, y2c)


def test_offset_needs_enough_derivatives(two_fold, arctan):
    with pytest.raises(ConfigError):
        compute_J(two_fold, [mpf(1), mpf(2)], 2, mpf(0))


def test_odd_jet_slots_vanish(k4):
    jet = k4.psi.jet()
    assert all(jet[j] == 0 for j in range(3, len(jet), 2))
    assert len(jet) == 9


def test_jet_keeps_value_and_slope_of_base(k4, arctan):
    y2c = 1 / mpmath.sqrt(3)
    assert abs(k4.psi.jet()[0] - mpf(2) / 3) < mpf(10) ** -100
    assert abs(k4.psi.jet()[1] - arctan.derivative(y2c)) < mpf(10) ** -100


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_literal_convention_hits_targets_exactly(k):
    spec = SynthesisSpec(k, "1e-3", convention="literal")
    res = synthesize(spec, check_monotonicity=False)
    target = build_target_polynomial(k)
    for got, want in zip(res.derivative_ledger(), target):
        assert abs(got / want - 1) < mpf(10) ** -20


def test_conventions_agree_to_order_delta_squared():
    a = construct_psi(SynthesisSpec(4, "1e-3")).psi.coefficients
    b = construct_psi(SynthesisSpec(4, "1e-3", convention="literal")).psi.coefficients
    for x, y in zip(a, b):
        if x != 0:
            assert abs(x / y - 1) < mpf("1e-4")


def test_golden_tables_for_k4(k4):
    report = golden_check(k4)
    assert report["passed"], report
    assert report["coefficients"][4]["sign_agrees"] is False


def test_golden_check_without_table():
    res = synthesize(SynthesisSpec(3, "1e-3"), check_monotonicity=False)
    assert golden_check(res) is None


def test_reference_tables_share_leading_entries():
    # the lowest jet entries do not depend on k or delta at printed accuracy
    for k in (6, 8):
        assert REFERENCE_PSI_COEFFICIENTS[k]["coefficients"][2] == "0.2137243716"


def test_k4_roots_near_square_roots(k4):
    assert k4.ok
    assert k4.n_simple_roots == 3
    for i, x2 in enumerate(k4.scaled_roots, start=1):
        assert abs(x2 / mpmath.sqrt(i) - 1) < mpf("0.05")


def test_k4_blend_is_monotone(k4):
    assert k4.monotonicity.passed
    assert k4.monotonicity.bound_min > 0


def test_k4_json_serializes(k4):
    data = json.loads(json.dumps(k4.to_json()))
    assert data["spec"]["k"] == 4
    assert len(data["roots"]) == 3
    assert data["phi_k"]["kind"] == "blended"


def test_k8_at_moderate_delta_keeps_five_roots():
    assert count_simple_roots(SynthesisSpec(8, "1e-4")) == 5


def test_root_count_is_monotone_in_delta_for_k8():
    small = count_simple_roots(SynthesisSpec(8, "1e-6"))
    large = count_simple_roots(SynthesisSpec(8, "1e-3"))
    assert small == 7
    assert large < small


def test_delta_too_large_is_reported():
    with pytest.raises(SynthesisError) as info:
        synthesize(SynthesisSpec(4, "0.1"), check_monotonicity=False)
    assert info.value.reason == "delta too large"
    assert info.value.result is not None


def test_upsilon_too_large_is_reported():
    with pytest.raises(SynthesisError) as info:
        synthesize(SynthesisSpec(8, "1e-5", upsilon="0.6"))
    assert info.value.reason == "upsilon too large"


def test_non_strict_returns_result():
    res = synthesize(SynthesisSpec(4, "0.1"), strict=False, check_monotonicity=False)
    assert not res.ok and res.reason == "delta too large"


def test_tune_delta_for_k4():
    spec = SynthesisSpec(4, "1e-2")
    tuned = tune_delta(spec, 3, bracket=("1e-2", "1e-1"), sig_digits=2)
    d = tuned.threshold
    assert count_simple_roots(spec.with_delta(d * (1 - mpf("1e-3")))) == 3
    assert count_simple_roots(spec.with_delta(d * (1 + mpf("1e-2")))) < 3
    assert tuned.upper / tuned.threshold - 1 <= mpf("1e-3")


def test_tune_delta_without_transition():
    with pytest.raises(SynthesisError) as info:
        tune_delta(SynthesisSpec(4, "1e-3"), 3, bracket=("1e-4", "1e-2"))
    assert info.value.reason == "no transition"


@pytest.mark.parametrize("kwargs", [
    {"k": 1, "delta": "1e-3"},
    {"k": 4, "delta": "0"},
    {"k": 4, "delta": "1e-3", "upsilon": "-1"},
    {"k": 4, "delta": "1e-3", "convention": "other"},
    {"k": 20, "delta": "1e-3"},
])
def test_invalid_specs(kwargs):
    with pytest.raises(ConfigError):
        SynthesisSpec(**kwargs)


def test_synthesis_rejects_system_without_quadratic_fold():
    with pytest.raises(ConfigError):
        synthesize(SynthesisSpec(4, "1e-3", system=reference_system(xi=0)))

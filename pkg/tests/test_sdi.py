import mpmath
import pytest
from mpmath import mpf

from canard.errors import ConfigError, InsufficientDerivativesError
from canard.pws import reference_system
from canard.sdi import (
    build_profile,
    find_simple_roots,
    scaled_I2,
    sdi_expansion,
    sdi_ipm,
    sdi_quadrature,
    sdi_series,
    xi_map,
)

TIGHT = mpf(10) ** -90


def closed_form_integrand(u):
    """Integrand for the reference system and arctan sigmoid, written out by hand.

    Along the switching line the Filippov weight is ``4 / (6 + u)``, the
    divergence weight is ``u (3 + u/2)**2 / (1 - u/2)`` and the slope of the
    arctan sigmoid at ``phi^{-1}(p)`` equals ``sin(pi p)**2 / pi``.
    """
    p = 4 / (6 + u)
    return u * (3 + u / 2) ** 2 / (1 - u / 2) * mpmath.sin(mpmath.pi * p) ** 2 / mpmath.pi


def closed_form_integral(x):
    return mpmath.quad(closed_form_integrand, [-x, 0, x])


def test_xi_map_closed_form(two_fold):
    assert xi_map(two_fold, mpf("0.3")) == mpf("-0.3")
    assert xi_map(two_fold, mpf("-0.25"), "xi_minus") == mpf("-0.5")
    assert xi_map(two_fold, mpf("-0.25"), "xi_plus") == mpf("0.5")


def test_xi_map_numeric_route_agrees():
    with mpmath.workdps(30):
        sys = reference_system()
        assert abs(xi_map(sys, mpf("0.3"), method="numeric") + mpf("0.3")) < mpf(10) ** -25
        assert abs(xi_map(sys, mpf("-0.25"), "xi_plus", method="numeric") - mpf("0.5")) < mpf(10) ** -25


def test_xi_map_rejects_bad_input(two_fold):
    with pytest.raises(ConfigError):
        xi_map(two_fold, 1, "sideways")
    with pytest.raises(ConfigError):
        xi_map(two_fold, mpf("0.2"), "xi_plus")


def test_series_matches_closed_form_taylor_coefficients(two_fold, arctan):
    series = sdi_series(two_fold, arctan, 25)
    coeffs = mpmath.taylor(closed_form_integrand, 0, 24)
    for j, c in enumerate(coeffs):
        # integrating over [-x, x] keeps twice the odd antiderivative terms
        expected = 2 * c / (j + 1) if j % 2 == 0 else mpf(0)
        assert abs(series.coeffs[j + 1] - expected) < mpf(10) ** -60 * max(1, abs(expected))


def test_cubic_coefficient(two_fold, arctan):
    series = sdi_series(two_fold, arctan, 5)
    y2c = 1 / mpmath.sqrt(3)
    slope, curvature = arctan.derivative(y2c, 1), arctan.derivative(y2c, 2)
    expected = mpf(2) / 3 * (mpf(15) / 2 * slope - curvature / slope)
    assert abs(series.coeffs[3] - expected) < TIGHT
    assert abs(series.coeffs[3] - mpf("1.7710123423788407828")) < mpf(10) ** -18


def test_height_and_divergence_weight_series(two_fold, arctan):
    e = sdi_expansion(two_fold, arctan, 9)
    assert abs(e.height.coeffs[0] - 1 / mpmath.sqrt(3)) < TIGHT
    assert abs(e.height.coeffs[1] + 4 * mpmath.pi / 27) < TIGHT
    assert e.divergence_weight.coeffs[0] == 0
    assert abs(e.divergence_weight.coeffs[1] - 9) < TIGHT
    assert abs(e.weight.coeffs[0] - mpf(2) / 3) < TIGHT


@pytest.mark.parametrize("x", ["0.01", "0.05", "0.1"])
def test_quadrature_matches_closed_form(two_fold, arctan, x):
    x = mpf(x)
    assert abs(sdi_quadrature(two_fold, arctan, x) - closed_form_integral(x)) < mpf(10) ** -80


def test_quadrature_matches_long_series(two_fold, arctan):
    series = sdi_series(two_fold, arctan, 101)
    x = mpf("0.05")
    assert abs(sdi_quadrature(two_fold, arctan, x) - series.evaluate(x)) < mpf(10) ** -60


@pytest.mark.parametrize("x", ["0.02", "0.2", "0.6"])
def test_oddness(two_fold, arctan, x):
    x = mpf(x)
    assert abs(sdi_quadrature(two_fold, arctan, x) + sdi_quadrature(two_fold, arctan, -x)) < TIGHT


def test_series_has_only_odd_powers(two_fold, arctan):
    series = sdi_series(two_fold, arctan, 25)
    assert all(c == 0 for c in series.coeffs[0::2])


def test_integral_decays_like_cube(two_fold, arctan):
    a = sdi_quadrature(two_fold, arctan, mpf("1e-2"))
    b = sdi_quadrature(two_fold, arctan, mpf("1e-3"))
    assert 0 < b < a
    assert abs(a / b / 1000 - 1) < mpf("0.01")


def test_one_sided_integrals_are_negative(two_fold, arctan):
    minus, plus = sdi_ipm(two_fold, arctan, mpf("-0.25"))
    assert minus < 0 and plus < 0
    assert abs(minus - mpmath.quad(closed_form_integrand, [-mpf("0.5"), 0])) < mpf(10) ** -80


def test_explicit_jet_needs_enough_derivatives(two_fold, arctan):
    y2c = 1 / mpmath.sqrt(3)
    with pytest.raises(InsufficientDerivativesError):
        sdi_expansion(two_fold, None, 11, jet=arctan.derivatives(y2c, 5), y2c=y2c)


def test_asymmetric_lower_field_rejected_by_series(arctan):
    from canard.polynomial import AffinePolynomial
    from canard.pws import PlanarVectorField, PWSSystem

    base = reference_system()
    tilted = PWSSystem(base.zplus, PlanarVectorField(AffinePolynomial({(0, 0): -1, (1, 0): 1}), base.zminus.Y))
    with pytest.raises(ConfigError):
        sdi_series(tilted, arctan, 5)


def test_scaled_integral_series_and_quadrature_agree(two_fold, arctan):
    a = scaled_I2(two_fold, arctan, mpf("1.3"), mpf("0.05"), 1, method="quadrature")
    b = scaled_I2(two_fold, arctan, mpf("1.3"), mpf("0.05"), 1, method="series", order=61)
    assert abs(a - b) < mpf(10) ** -40 * abs(a)


def test_root_finder_on_close_pair():
    roots = [mpf("1.01"), mpf("2.013"), mpf("2.013") + mpf(10) ** -4, mpf("2.99")]
    f = lambda x: mpmath.fprod(x - r for r in roots)  # noqa: E731
    found = find_simple_roots(f, (0, 4), grid_n=50)
    assert len(found) == 4
    for r, got in zip(roots, found):
        assert abs(got.location - r) < mpf(10) ** -60
        assert got.simple


def test_root_finder_flags_tangency_as_non_simple():
    found = find_simple_roots(lambda x: (x - 1) * (x - 2) ** 2 * (x - 2 - mpf(10) ** -30), (0, 3))
    assert [r.simple for r in found][0]
    assert not all(r.simple for r in found)


def test_root_finder_rejects_empty_bracket():
    with pytest.raises(ConfigError):
        find_simple_roots(lambda x: x, (1, 0))


def test_profile(two_fold, arctan):
    grid = [mpf(j) / 10 for j in range(4)]
    prof = build_profile(two_fold, arctan, grid, order=25, method="series")
    assert prof.values[0] == 0
    assert all(v > 0 for v in prof.values[1:])
    with pytest.raises(ConfigError):
        build_profile(two_fold, arctan, grid, method="trapezoid")

import json
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest
from mpmath import mpf

from canard.errors import BeyondQuadraticTangencyError, ConfigError, NotSlidingError
from canard.polynomial import AffinePolynomial
from canard.pws import (
    PlanarVectorField,
    PWSSystem,
    audit_assumptions,
    classify_sigma_point,
    filippov_field,
    load_system,
    reference_system,
    transversality_constants,
)

TIGHT = mpf(10) ** -90
SYSTEMS = Path(__file__).resolve().parent.parent / "systems"


@pytest.mark.parametrize("x, kind", [
    (Fraction(-1, 2), "stable-sliding"),
    (Fraction(-1), "stable-sliding"),
    (Fraction(1, 3), "unstable-sliding"),
    (Fraction(0), "tangency"),
])
def test_classification_along_switching_line(two_fold, x, kind):
    assert classify_sigma_point(two_fold, x).kind == kind


def test_origin_is_visible_invisible_two_fold(two_fold):
    c = classify_sigma_point(two_fold, 0)
    assert c.tangency["two_fold_type"] == "VI"
    assert c.tangency["visibility"] == {"above": "visible", "below": "invisible"}
    assert c.tangency["vi3"]


def test_unfolding_splits_the_two_fold(two_fold):
    lam = Fraction(1, 10)
    assert classify_sigma_point(two_fold, 0, lam).tangency["side"] == "above"
    assert classify_sigma_point(two_fold, lam, lam).tangency["side"] == "below"
    # between the two folds both fields point upward: crossing
    assert classify_sigma_point(two_fold, Fraction(1, 20), lam).kind == "crossing"


def test_degenerate_tangency_is_rejected():
    flat = reference_system(xi=0)
    cubic = PWSSystem(
        PlanarVectorField(AffinePolynomial({(0, 0): 1}), AffinePolynomial({(3, 0): 1})),
        flat.zminus,
    )
    with pytest.raises(BeyondQuadraticTangencyError):
        classify_sigma_point(cubic, 0)


def test_outside_domain(two_fold):
    with pytest.raises(ConfigError):
        classify_sigma_point(two_fold, 2)


def test_sliding_speed_and_weight_at_two_fold(two_fold):
    speed, weight = filippov_field(two_fold, 0)
    assert abs(speed - mpf(1) / 3) < TIGHT
    assert abs(weight - mpf(2) / 3) < TIGHT


@pytest.mark.parametrize("x", ["-0.7", "-0.2", "0.3", "0.9"])
def test_sliding_speed_closed_form(two_fold, x):
    # (X- Y+ - X+ Y-)/(Y+ - Y-) with Y+ = x + x^2/2 and Y- = -2x
    x = mpf(x)
    yp, ym = x + x * x / 2, -2 * x
    expected = (-1 * yp - 1 * ym) / (yp - ym)
    assert abs(filippov_field(two_fold, x)[0] - expected) < TIGHT


def test_filippov_identity_on_ten_thousand_points(two_fold):
    worst = mpf(0)
    count = 0
    for i in range(100):
        lam = Fraction(i - 50, 500)
        sf = two_fold.sliding_functions(lam)
        for j in range(100):
            x = mpf(-1) + mpf(2) * (j + mpf(1) / 2) / 100
            (xp, yp), (xm, ym) = two_fold.fields_at(x, 0, lam)
            if abs(yp - ym) < mpf(10) ** -30:
                continue
            p = -ym / (yp - ym)
            lhs = sf.sliding_speed(x)
            rhs = p * xp + (1 - p) * xm
            worst = max(worst, abs(lhs - rhs) / max(1, abs(rhs)))
            count += 1
    assert count >= 9900
    assert worst < TIGHT


def test_filippov_refuses_crossing_points(two_fold):
    with pytest.raises(NotSlidingError):
        filippov_field(two_fold, Fraction(1, 20), Fraction(1, 10))


def test_reference_audit_passes(two_fold):
    report = audit_assumptions(two_fold)
    assert report.passed, report.to_json()


@pytest.mark.parametrize("kwargs, failing", [
    ({"beta": Fraction(1, 2)}, {"visible_invisible_two_fold", "sliding_speed"}),
    ({"xi": 0}, {"quadratic_fold"}),
])
def test_audit_detects_broken_hypotheses(kwargs, failing):
    report = audit_assumptions(reference_system(**kwargs))
    assert {item.name for item in report.failed} == failing


def test_attracting_variant_passes_audit():
    assert audit_assumptions(reference_system(xi=-1)).passed


def test_transversality_constants(two_fold, arctan):
    a_const, b_const = transversality_constants(two_fold, arctan)
    assert abs(a_const - 27 / (4 * mpmath.pi)) < TIGHT
    assert abs(b_const - 2) < TIGHT


def test_json_round_trip(tmp_path, two_fold):
    path = tmp_path / "system.json"
    path.write_text(two_fold.dumps())
    loaded = load_system(path)
    assert loaded.to_json() == two_fold.to_json()
    assert json.loads(loaded.dumps())["lambda0"] == "0"


def test_bundled_system_files_match_constructor():
    assert load_system(SYSTEMS / "two_fold_quadratic_linear.json").to_json()["zplus"] == reference_system().to_json()["zplus"]
    assert load_system(SYSTEMS / "two_fold_attracting.json").to_json()["zplus"] == reference_system(xi=-1).to_json()["zplus"]


def test_malformed_system_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"zplus": 3}')
    with pytest.raises(ConfigError):
        load_system(path)
    with pytest.raises(ConfigError):
        load_system(tmp_path / "missing.json")

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from canard.errors import ConfigError
from canard.polynomial import (
    AffinePolynomial,
    count_real_roots,
    isolate_real_roots,
    poly_derivative,
    poly_eval,
    sturm_sequence,
)


def expand(roots):
    coeffs = [Fraction(1)]
    for r in roots:
        coeffs = [(coeffs[j - 1] if j else 0) - r * (coeffs[j] if j < len(coeffs) else 0)
                  for j in range(len(coeffs) + 1)]
    return coeffs


def test_affine_polynomial_evaluation_and_partials():
    p = AffinePolynomial({(1, 0): (-2, 0), (0, 0): (0, 2), (2, 1): (Fraction(1, 2), 1)})
    assert float(p.evaluate(1, 0, 0)) == -2
    assert float(p.evaluate(1, 2, 3)) == -2 + 6 + 0.5 * 2 + 3 * 2
    px = p.partial("x")
    assert px.terms[(1, 1)] == (1, 2)
    assert p.partial("y").terms == {(2, 0): (Fraction(1, 2), Fraction(1))}
    assert p.lam_derivative().terms == {(0, 0): (2, 0), (2, 1): (1, 0)}


def test_restriction_to_switching_line_is_exact():
    p = AffinePolynomial({(1, 0): (1, 0), (2, 0): (Fraction(1, 2), 0), (0, 1): (5, 0)})
    assert p.restrict_y0(Fraction(0)) == [0, 1, Fraction(1, 2)]


def test_json_round_trip():
    p = AffinePolynomial({(1, 0): (-2, 0), (0, 0): (0, 2)})
    assert AffinePolynomial.from_json(p.to_json()).terms == p.terms


def test_malformed_json_is_config_error():
    with pytest.raises(ConfigError):
        AffinePolynomial.from_json([{"x": 1}])
    with pytest.raises(ConfigError):
        AffinePolynomial({(0, 0): object()})


def test_sturm_counts_known_roots():
    coeffs = expand([Fraction(-1), Fraction(1, 3), Fraction(2)])
    assert count_real_roots(coeffs, Fraction(-5), Fraction(5)) == 3
    assert count_real_roots(coeffs, Fraction(0), Fraction(1)) == 1
    # (lo, hi] convention
    assert count_real_roots(coeffs, Fraction(-1), Fraction(0)) == 0
    assert count_real_roots(coeffs, Fraction(-2), Fraction(-1)) == 1


def test_no_real_roots():
    assert count_real_roots([1, 0, 1], -10, 10) == 0


def test_repeated_root_counted_once():
    coeffs = expand([Fraction(1), Fraction(1), Fraction(3)])
    assert count_real_roots(coeffs, Fraction(0), Fraction(4)) == 2


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(-20, 20), min_size=1, max_size=6), st.integers(1, 5))
def test_isolation_finds_every_rational_root(roots, scale):
    rs = sorted(Fraction(r, scale) for r in roots)
    coeffs = expand(rs)
    boxes = isolate_real_roots(coeffs, Fraction(-21), Fraction(21), width=Fraction(1, 1000))
    assert len(boxes) == len(set(rs))
    for (a, b), r in zip(boxes, sorted(set(rs))):
        assert a < r <= b


def test_sturm_sequence_ends_in_constant_for_squarefree():
    seq = sturm_sequence(expand([Fraction(1), Fraction(2)]))
    assert len(seq[-1]) == 1


def test_poly_helpers():
    assert poly_eval([1, 2, 3], 2) == 17
    assert poly_derivative([1, 2, 3]) == [2, 6]

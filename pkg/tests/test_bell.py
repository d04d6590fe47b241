"""Partial Bell polynomials against a brute force sum over set partitions."""

from fractions import Fraction
from math import factorial

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from canard.bell import bell_polynomial, bell_table, faa_di_bruno
from canard.series import TruncatedSeries


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def brute_bell(m, n, xs):
    total = Fraction(0)
    for part in set_partitions(list(range(m))):
        if len(part) == n:
            term = Fraction(1)
            for block in part:
                term *= xs[len(block) - 1]
            total += term
    return total


def test_set_partition_count_is_bell_number():
    assert sum(1 for _ in set_partitions(list(range(6)))) == 203


@pytest.mark.parametrize("m", range(0, 11))
def test_table_matches_brute_force_up_to_order_10(m):
    xs = [Fraction(j * j - 3, j + 1) for j in range(1, 11)]
    table = bell_table(10, xs)
    for n in range(0, m + 1):
        assert table[m][n] == brute_bell(m, n, xs)


def test_known_values():
    xs = [Fraction(1)] * 6
    # B(m, n; 1, 1, ...) are Stirling numbers of the second kind
    assert [bell_polynomial(6, n, xs) for n in range(7)] == [0, 1, 31, 90, 65, 15, 1]
    assert bell_polynomial(3, 5, xs) == 0


def test_faa_di_bruno_matches_brute_force_chain_rule():
    outer = [Fraction(j + 2, j + 1) for j in range(11)]
    inner = [Fraction(0)] + [Fraction((-1) ** j, j + 3) for j in range(1, 11)]
    for m in range(1, 11):
        expected = sum(outer[n] * brute_bell(m, n, inner[1:]) for n in range(1, m + 1))
        assert faa_di_bruno(outer, inner, m) == expected


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=10, max_size=10),
       st.lists(st.integers(-5, 5), min_size=10, max_size=10))
def test_faa_di_bruno_agrees_with_series_composition(outer_c, inner_c):
    with mpmath.workdps(60):
        m = 10
        inner_c = [0] + inner_c
        outer_d = [mpmath.mpf(c) for c in outer_c] + [mpmath.mpf(1)]
        inner_d = [mpmath.mpf(c) for c in inner_c]
        comp = TruncatedSeries.from_derivatives(outer_d, 0, m).compose(
            TruncatedSeries.from_derivatives(inner_d, 0, m))
        for order in range(1, m + 1):
            got = faa_di_bruno(outer_d, inner_d, order)
            ref = comp.coeffs[order] * factorial(order)
            assert abs(got - ref) <= mpmath.mpf(10) ** -40 * max(1, abs(ref))


def test_faa_di_bruno_needs_enough_derivatives():
    with pytest.raises(ValueError):
        faa_di_bruno([1, 2], [0, 1], 3)

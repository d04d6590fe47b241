"""Partial Bell polynomials and the higher order chain rule.

The partial Bell polynomial ``B(m, n; x_1, ..., x_{m-n+1})`` sums, over all
partitions of ``{1, ..., m}`` into ``n`` blocks, the product of ``x_b``
taken over block sizes ``b``.  It is evaluated here with the standard
recurrence

    B(m, n) = sum_{j=1}^{m-n+1} C(m-1, j-1) x_j B(m-j, n-1)

with ``B(0, 0) = 1`` and ``B(m, 0) = B(0, n) = 0`` otherwise.  The chain rule
for the ``m``-th derivative of ``f(g(x))`` then reads

    (f o g)^(m) = sum_{n=1}^{m} f^(n)(g) B(m, n; g', g'', ...).

Both functions are generic in the scalar type, so exact integers and
fractions work as well as ``mpf``.
"""

from __future__ import annotations

from math import comb
from typing import Sequence

__all__ = ["bell_table", "bell_polynomial", "faa_di_bruno"]


def bell_table(m_max: int, xs: Sequence) -> list[list]:
    """All partial Bell polynomials with ``m <= m_max``.

    Parameters
    ----------
    m_max : int
        Largest total order.
    xs : sequence
        Arguments ``x_1, x_2, ...``; ``xs[0]`` is ``x_1``.  At least
        ``m_max`` entries are needed when ``m_max > 0``.

    Returns
    -------
    list of lists
        ``table[m][n]`` holds ``B(m, n)`` for ``0 <= n <= m``.
    """
    if m_max < 0:
        raise ValueError("m_max must be non-negative")
    if len(xs) < m_max:
        raise ValueError(f"need {m_max} arguments, got {len(xs)}")
    zero = xs[0] * 0 if len(xs) else 0
    table: list[list] = [[zero + 1]]
    for m in range(1, m_max + 1):
        row = [zero]
        for n in range(1, m + 1):
            acc = zero
            for j in range(1, m - n + 2):
                prev = table[m - j]
                if n - 1 < len(prev):
                    acc = acc + comb(m - 1, j - 1) * xs[j - 1] * prev[n - 1]
            row.append(acc)
        table.append(row)
    return table


def bell_polynomial(m: int, n: int, xs: Sequence):
    """Evaluate the partial Bell polynomial ``B(m, n; xs)``."""
    if m < 0 or n < 0:
        raise ValueError("orders must be non-negative")
    if n > m:
        return xs[0] * 0 if len(xs) else 0
    return bell_table(m, list(xs) + [xs[0] * 0 if len(xs) else 0] * max(0, m - len(xs)))[m][n]


def faa_di_bruno(outer: Sequence, inner: Sequence, m: int):
    """``m``-th derivative of a composition by the higher order chain rule.

    Parameters
    ----------
    outer : sequence
        ``outer[n]`` is the ``n``-th derivative of the outer function at the
        image point, for ``n = 0, ..., m``.
    inner : sequence
        ``inner[j]`` is the ``j``-th derivative of the inner function at the
        base point, for ``j = 0, ..., m``.  ``inner[0]`` is not used.
    m : int
        Derivative order.
    """
    if m == 0:
        return outer[0]
    if len(outer) < m + 1 or len(inner) < m + 1:
        raise ValueError(f"derivatives up to order {m} are required")
    table = bell_table(m, list(inner[1: m + 1]))
    total = outer[0] * 0
    for n in range(1, m + 1):
        total = total + outer[n] * table[m][n]
    return total

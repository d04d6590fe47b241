"""Truncated power series with arbitrary precision coefficients.

A :class:`TruncatedSeries` stores the Taylor coefficients
``a_0, ..., a_N`` of a function expanded around a center ``c``, so that it
represents ``sum(a_j * (x - c)**j)`` modulo ``(x - c)**(N + 1)``.  The
arithmetic follows the usual rules of the ring of truncated series: sums and
products keep the smaller order of the two operands, composition substitutes
one series into another, and reversion inverts a series with nonzero linear
term by Newton iteration.

Derivatives at the center are ``j! * a_j``; :meth:`TruncatedSeries.derivative_at_center`
and :meth:`TruncatedSeries.from_derivatives` convert between the two views.

Examples
--------
>>> from canard.series import TruncatedSeries
>>> f = TruncatedSeries([0, 1, 1], order=4)          # x + x**2
>>> [int(c) for c in f.reversion().coeffs]
[0, 1, -1, 2, -5]
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
from mpmath import mpf

from .errors import NonInvertibleJetError, NonUnitSeriesError, SeriesMismatchError
from .precision import Number, big

__all__ = ["TruncatedSeries", "series_variable", "series_constant"]


def _convolve(a: Sequence[mpf], b: Sequence[mpf], order: int) -> list[mpf]:
    out = []
    for n in range(order + 1):
        lo = max(0, n - len(b) + 1)
        hi = min(n, len(a) - 1)
        out.append(mpmath.fsum(a[j] * b[n - j] for j in range(lo, hi + 1)) if lo <= hi else mpf(0))
    return out


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Taylor coefficients of a function around ``center`` up to ``order``.

    Parameters
    ----------
    coeffs : sequence of numbers
        Coefficients ``a_0, a_1, ...``.  Missing entries up to ``order`` are
        zero and extra entries are dropped.
    center : number, default 0
        Expansion point.
    order : int, optional
        Truncation order ``N``.  Defaults to ``len(coeffs) - 1``.
    """

    coeffs: tuple
    center: mpf
    order: int

    def __init__(self, coeffs: Iterable[Number], center: Number = 0, order: int | None = None):
        values = [big(c) for c in coeffs]
        if order is None:
            order = len(values) - 1
        if order < 0:
            raise ValueError("order must be non-negative")
        values = values[: order + 1] + [mpf(0)] * (order + 1 - len(values))
        object.__setattr__(self, "coeffs", tuple(values))
        object.__setattr__(self, "center", big(center))
        object.__setattr__(self, "order", int(order))

    # construction helpers -------------------------------------------------
    @classmethod
    def from_derivatives(cls, derivatives: Sequence[Number], center: Number = 0,
                         order: int | None = None) -> "TruncatedSeries":
        """Build a series from the derivative values ``f(c), f'(c), ...``."""
        coeffs = [big(d) / mpmath.factorial(j) for j, d in enumerate(derivatives)]
        return cls(coeffs, center, order)

    def derivative_at_center(self, n: int) -> mpf:
        """Return ``f^(n)(center) = n! * a_n``."""
        if n > self.order:
            raise IndexError(f"derivative of order {n} exceeds series order {self.order}")
        return self.coeffs[n] * mpmath.factorial(n)

    def derivatives(self) -> list[mpf]:
        """All derivatives at the center up to the truncation order."""
        return [self.derivative_at_center(j) for j in range(self.order + 1)]

    def with_order(self, order: int) -> "TruncatedSeries":
        """Truncate (or zero pad) to a new order."""
        return TruncatedSeries(self.coeffs, self.center, order)

    def _check(self, other: "TruncatedSeries") -> int:
        if not isinstance(other, TruncatedSeries):
            raise TypeError("expected a TruncatedSeries")
        if self.center != other.center:
            raise SeriesMismatchError(
                f"series centers differ: {mpmath.nstr(self.center, 10)} vs {mpmath.nstr(other.center, 10)}")
        return min(self.order, other.order)

    # ring operations -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            n = self._check(other)
            return TruncatedSeries([self.coeffs[j] + other.coeffs[j] for j in range(n + 1)], self.center, n)
        c = list(self.coeffs)
        c[0] += big(other)
        return TruncatedSeries(c, self.center, self.order)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs], self.center, self.order)

    def __sub__(self, other):
        return self + (-other if isinstance(other, TruncatedSeries) else -big(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            n = self._check(other)
            return TruncatedSeries(_convolve(self.coeffs, other.coeffs, n), self.center, n)
        s = big(other)
        return TruncatedSeries([c * s for c in self.coeffs], self.center, self.order)

    __rmul__ = __mul__

    def reciprocal(self) -> "TruncatedSeries":
        """Multiplicative inverse; the constant term must be nonzero."""
        a = self.coeffs
        if a[0] == 0:
            raise NonUnitSeriesError("series with zero constant term has no reciprocal")
        inv0 = 1 / a[0]
        out = [inv0]
        for n in range(1, self.order + 1):
            out.append(-inv0 * mpmath.fsum(a[j] * out[n - j] for j in range(1, n + 1)))
        return TruncatedSeries(out, self.center, self.order)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            n = self._check(other)
            b = other.coeffs
            if b[0] == 0:
                raise NonUnitSeriesError("division by a series with zero constant term")
            a = self.coeffs
            inv0 = 1 / b[0]
            q: list[mpf] = []
            for i in range(n + 1):
                s = a[i] - mpmath.fsum(q[j] * b[i - j] for j in range(i))
                q.append(s * inv0)
            return TruncatedSeries(q, self.center, n)
        s = big(other)
        if s == 0:
            raise NonUnitSeriesError("division of a series by zero")
        return TruncatedSeries([c / s for c in self.coeffs], self.center, self.order)

    def __rtruediv__(self, other):
        return self.reciprocal() * big(other)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = series_constant(1, self.center, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # calculus ----------------------------------------------------------------
    def derivative(self) -> "TruncatedSeries":
        """Series of ``f'``, one order lower."""
        if self.order == 0:
            return TruncatedSeries([0], self.center, 0)
        return TruncatedSeries([j * self.coeffs[j] for j in range(1, self.order + 1)],
                               self.center, self.order - 1)

    def integral(self, constant: Number = 0) -> "TruncatedSeries":
        """Antiderivative taking the value ``constant`` at the center."""
        c = [big(constant)] + [self.coeffs[j] / (j + 1) for j in range(self.order + 1)]
        return TruncatedSeries(c, self.center, self.order + 1)

    def exp(self) -> "TruncatedSeries":
        """Series of ``exp(f)`` through the recurrence ``b' = f' b``."""
        a = self.coeffs
        b = [mpmath.exp(a[0])]
        for n in range(1, self.order + 1):
            b.append(mpmath.fsum(j * a[j] * b[n - j] for j in range(1, n + 1)) / n)
        return TruncatedSeries(b, self.center, self.order)

    def odd_part(self) -> "TruncatedSeries":
        return TruncatedSeries([c if j % 2 else 0 for j, c in enumerate(self.coeffs)], self.center, self.order)

    def even_part(self) -> "TruncatedSeries":
        return TruncatedSeries([0 if j % 2 else c for j, c in enumerate(self.coeffs)], self.center, self.order)

    # composition -------------------------------------------------------------
    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """Return ``self(inner(x))`` expanded around ``inner.center``.

        The constant term of ``inner`` must equal ``self.center``; the result
        is truncated at the highest order that both operands determine, which
        is ``min(self.order, inner.order)`` when ``inner`` has a nonzero
        linear term.
        """
        if not isinstance(inner, TruncatedSeries):
            raise TypeError("inner must be a TruncatedSeries")
        if inner.coeffs[0] != self.center:
            raise SeriesMismatchError(
                "inner constant term must equal the outer center for composition")
        n = inner.order
        shift = [mpf(0)] + list(inner.coeffs[1:])
        # lowest power present in the shifted inner series bounds the terms needed
        valuation = next((j for j in range(1, n + 1) if shift[j] != 0), n + 1)
        top = min(self.order, n // valuation if valuation <= n else 0)
        acc = [mpf(0)] * (n + 1)
        for c in reversed(self.coeffs[: top + 1]):
            acc = _convolve(acc, shift, n)
            acc[0] += c
        valid = n if valuation > n else min(n, (self.order + 1) * valuation - 1)
        return TruncatedSeries(acc, inner.center, valid)

    def __call__(self, x):
        """Evaluate at a point, or compose when given another series."""
        if isinstance(x, TruncatedSeries):
            return self.compose(x)
        return self.evaluate(x)

    def evaluate(self, x: Number) -> mpf:
        """Horner evaluation of the truncated polynomial at ``x``."""
        t = big(x) - self.center
        acc = mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def reversion(self) -> "TruncatedSeries":
        """Compositional inverse ``g`` with ``self(g(y)) = y``.

        The result is centered at ``self.coeffs[0]`` and takes the value
        ``self.center`` there.  Newton's iteration doubles the number of
        correct coefficients per step.
        """
        a1 = self.coeffs[1] if self.order >= 1 else mpf(0)
        if a1 == 0:
            raise NonInvertibleJetError("series reversion needs a nonzero linear coefficient")
        n = self.order
        f = TruncatedSeries([0] + list(self.coeffs[1:]), 0, n)
        df = f.derivative()
        g = TruncatedSeries([0, 1 / a1], 0, n)
        target = TruncatedSeries([0, 1], 0, n)
        done = 1
        while done < n:
            done = min(2 * done, n)
            gt = g.with_order(done)
            residual = f.with_order(done).compose(gt) - target.with_order(done)
            slope = df.with_order(done).compose(gt)
            if df.order < done:
                slope = slope.with_order(done)
            g = (gt - residual / slope).with_order(n)
        return TruncatedSeries([self.center] + list(g.coeffs[1:]), self.coeffs[0], n)

    # comparison helpers ------------------------------------------------------
    def max_abs_difference(self, other: "TruncatedSeries") -> mpf:
        n = self._check(other)
        return max(abs(self.coeffs[j] - other.coeffs[j]) for j in range(n + 1))

    def __repr__(self) -> str:
        shown = ", ".join(mpmath.nstr(c, 8) for c in self.coeffs[:6])
        more = ", ..." if self.order >= 6 else ""
        return f"TruncatedSeries([{shown}{more}], center={mpmath.nstr(self.center, 8)}, order={self.order})"


def series_variable(center: Number = 0, order: int = 1) -> TruncatedSeries:
    """The identity function ``x`` expanded around ``center``."""
    return TruncatedSeries([big(center), 1], center, max(order, 1)).with_order(order)


def series_constant(value: Number, center: Number = 0, order: int = 0) -> TruncatedSeries:
    """A constant function as a truncated series."""
    return TruncatedSeries([value], center, order)

"""Adaptive double exponential quadrature at working precision.

The tanh-sinh rule of :func:`mpmath.quad` does the actual work.  This wrapper
adds what the rest of the package needs: a caller supplied tolerance, interval
bisection when the rule's own error estimate is not good enough, and a
dedicated exception carrying the best estimate when the budget runs out.
"""

from __future__ import annotations

from typing import Callable, Sequence

import mpmath
from mpmath import mp, mpf

from .errors import QuadratureError
from .precision import Number, big

__all__ = ["quadrature"]


def _rule(f, a, b):
    value, err = mpmath.quad(f, [a, b], method="tanh-sinh", error=True)
    return value, abs(err)


def quadrature(f: Callable[[mpf], mpf], a: Number, b: Number, tol: Number | None = None,
               breakpoints: Sequence[Number] = (), max_splits: int = 64) -> mpf:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Parameters
    ----------
    f : callable
        Integrand returning ``mpf`` values.
    a, b : number
        Integration limits; ``a > b`` flips the sign as usual.
    tol : number, optional
        Absolute tolerance.  Defaults to ``10**(-(dps - 10))``.
    breakpoints : sequence of numbers
        Interior points where ``f`` is less smooth; the interval is split
        there before the adaptive loop starts.
    max_splits : int
        Bisection budget across all subintervals.

    Returns
    -------
    mpf
        The integral.

    Raises
    ------
    QuadratureError
        When the summed error estimate stays above ``tol``.
    """
    a, b = big(a), big(b)
    tol = mpf(10) ** (-(mp.dps - 10)) if tol is None else big(tol)
    if a == b:
        return mpf(0)
    sign = 1
    if a > b:
        a, b, sign = b, a, -1
    cuts = sorted({a, b} | {big(p) for p in breakpoints if a < big(p) < b})
    pending = [(cuts[i], cuts[i + 1]) for i in range(len(cuts) - 1)]
    total = mpf(0)
    total_err = mpf(0)
    splits = 0
    while pending:
        lo, hi = pending.pop()
        value, err = _rule(f, lo, hi)
        share = tol * (hi - lo) / (b - a)
        if err <= share or splits >= max_splits:
            total += value
            total_err += err
            continue
        mid = (lo + hi) / 2
        pending.extend([(lo, mid), (mid, hi)])
        splits += 1
    if total_err > tol:
        raise QuadratureError(
            f"quadrature error estimate {mpmath.nstr(total_err, 5)} exceeds tolerance {mpmath.nstr(tol, 5)}",
            estimate=sign * total, achieved=total_err)
    return sign * total

"""Dormand-Prince 5(4) integrator with dense output and event location.

The integrator is generic over the scalar type: pass ``number=float`` for
double precision or ``number=mpf`` to run at the current mpmath precision.
Step sizes follow a proportional-integral controller; the continuous
extension is the standard fourth order interpolant of the pair.  Events are
scalar functions ``g(t, y)`` whose sign changes are located on the dense
output with the Illinois variant of regula falsi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction as F
from typing import Callable, Sequence

import mpmath
from mpmath import mpf

from .errors import ConfigError, StiffSegmentError

__all__ = ["Event", "EventRecord", "Segment", "Solution", "dopri45"]

_C = [F(0), F(1, 5), F(3, 10), F(4, 5), F(8, 9), F(1), F(1)]
_A = [
    [],
    [F(1, 5)],
    [F(3, 40), F(9, 40)],
    [F(44, 45), F(-56, 15), F(32, 9)],
    [F(19372, 6561), F(-25360, 2187), F(64448, 6561), F(-212, 729)],
    [F(9017, 3168), F(-355, 33), F(46732, 5247), F(49, 176), F(-5103, 18656)],
    [F(35, 384), F(0), F(500, 1113), F(125, 192), F(-2187, 6784), F(11, 84)],
]
# fifth order weights minus embedded fourth order weights
_E = [F(71, 57600), F(0), F(-71, 16695), F(71, 1920), F(-17253, 339200), F(22, 525), F(-1, 40)]
# continuous extension: y(t + s h) = y + h sum_i K_i sum_j P[i][j] s**(j+1)
_P = [
    [F(1), F(-8048581381, 2820520608), F(8663915743, 2820520608), F(-12715105075, 11282082432)],
    [F(0), F(0), F(0), F(0)],
    [F(0), F(131558114200, 32700410799), F(-68118460800, 10900136933), F(87487479700, 32700410799)],
    [F(0), F(-1754552775, 470086768), F(14199869525, 1410260304), F(-10690763975, 1880347072)],
    [F(0), F(127303824393, 49829197408), F(-318862633887, 49829197408), F(701980252875, 199316789632)],
    [F(0), F(-282668133, 205662961), F(2019193451, 616988883), F(-1453857185, 822651844)],
    [F(0), F(40617522, 29380423), F(-110615467, 29380423), F(69997945, 29380423)],
]


def _converter(number) -> Callable[[F], object]:
    if number is float:
        return float
    if number is mpf:
        return lambda q: mpf(q.numerator) / q.denominator
    raise ConfigError("number must be float or mpmath.mpf")


class _Tableau:
    """Butcher coefficients converted once to the requested scalar type."""

    _cache: dict = {}

    def __new__(cls, number):
        key = (number, mpmath.mp.prec if number is mpf else 0)
        if key not in cls._cache:
            conv = _converter(number)
            obj = super().__new__(cls)
            obj.c = [conv(v) for v in _C]
            obj.a = [[conv(v) for v in row] for row in _A]
            obj.e = [conv(v) for v in _E]
            obj.p = [[conv(v) for v in row] for row in _P]
            cls._cache[key] = obj
        return cls._cache[key]


@dataclass(frozen=True)
class Event:
    """Scalar event function.

    Parameters
    ----------
    func : callable
        ``g(t, y)`` returning a scalar.
    direction : int
        ``+1`` only counts increasing crossings, ``-1`` decreasing ones,
        ``0`` both.  A crossing needs a strictly signed value before it, so
        starting exactly on the event surface does not trigger.
    terminal : bool
        Stop integrating at the first counted crossing.
    """

    func: Callable
    direction: int = 0
    terminal: bool = False
    name: str = "event"


@dataclass(frozen=True)
class EventRecord:
    name: str
    t: object
    y: tuple


@dataclass(frozen=True)
class Segment:
    """One accepted step with its stage derivatives for dense output."""

    t0: object
    h: object
    y0: tuple
    k: tuple

    def __call__(self, t, p) -> tuple:
        s = (t - self.t0) / self.h
        powers = (s, s * s, s * s * s, s * s * s * s)
        out = []
        for comp, y in enumerate(self.y0):
            acc = 0 * s
            for i, row in enumerate(p):
                if self.k[i][comp] == 0:
                    continue
                w = row[0] * powers[0] + row[1] * powers[1] + row[2] * powers[2] + row[3] * powers[3]
                acc = acc + w * self.k[i][comp]
            out.append(y + self.h * acc)
        return tuple(out)


@dataclass
class Solution:
    """Accepted nodes, dense segments and located events."""

    ts: list
    ys: list
    segments: list
    events: list = field(default_factory=list)
    status: str = "finished"
    nfev: int = 0
    rejected: int = 0
    number: type = float

    @property
    def t_final(self):
        return self.ts[-1]

    @property
    def y_final(self) -> tuple:
        return self.ys[-1]

    def __call__(self, t) -> tuple:
        """Dense output at time ``t`` inside the integrated range."""
        if not self.segments:
            return self.ys[0]
        p = _Tableau(self.number).p
        forward = self.ts[-1] >= self.ts[0]
        lo, hi = 0, len(self.segments) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            seg = self.segments[mid]
            end = seg.t0 + seg.h
            if (t > end) if forward else (t < end):
                lo = mid + 1
            else:
                hi = mid
        return self.segments[lo](t, p)


def _norm(err, y0, y1, rtol, atol):
    total = 0.0
    for e, a, b in zip(err, y0, y1):
        scale = atol + rtol * max(abs(float(a)), abs(float(b)))
        total += (float(e) / scale) ** 2
    return math.sqrt(total / len(err))


def _locate(event: Event, seg: Segment, p, g0, g1, tol, max_iter=100):
    """Illinois regula falsi for a sign change of ``g`` inside ``seg``."""
    a, b = seg.t0, seg.t0 + seg.h
    ga, gb = g0, g1
    side = 0
    t = b
    for _ in range(max_iter):
        t = (a * gb - b * ga) / (gb - ga)
        gt = event.func(t, seg(t, p))
        if gt == 0 or abs(b - a) <= tol:
            break
        if (gt > 0) == (gb > 0):
            b, gb = t, gt
            if side == -1:
                ga = ga / 2
            side = -1
        else:
            a, ga = t, gt
            if side == 1:
                gb = gb / 2
            side = 1
    return t


def dopri45(f: Callable, t0, y0: Sequence, t_end, rtol=1e-9, atol=1e-12, events: Sequence[Event] = (),
            h0=None, max_steps: int = 200000, number=float, h_min_factor: float = 64.0,
            h_floor: float = 0.0, keep_segments: bool = True) -> Solution:
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_end``.

    Parameters
    ----------
    f : callable
        ``f(t, y)`` returning a sequence of the same length as ``y``.
    t_end : number
        May be smaller than ``t0`` for backward integration.
    rtol, atol : float
        Tolerances of the mixed error norm.
    events : sequence of Event
        Located on the dense output after every accepted step.
    number : {float, mpmath.mpf}
        Scalar type of the arithmetic.
    h_min_factor : float
        The smallest admissible step is this many units in the last place
        of ``t``; going below raises :class:`StiffSegmentError`.
    h_floor : float
        Absolute step floor with the same effect, for callers that know the
        natural time scale of the problem.

    Returns
    -------
    Solution
        ``status`` is ``"finished"`` or ``"event"``.
    """
    conv = _converter(number)
    tab = _Tableau(number)
    t0 = number(t0) if number is float else mpf(t0)
    t_end = number(t_end) if number is float else mpf(t_end)
    y = tuple(number(v) if number is float else mpf(v) for v in y0)
    if rtol <= 0 or atol <= 0:
        raise ConfigError("tolerances must be positive")
    sol = Solution([t0], [y], [], number=number)
    if t_end == t0:
        return sol
    direction = 1 if t_end > t0 else -1
    span = abs(t_end - t0)
    eps = 2.0 ** -52 if number is float else float(mpmath.eps)
    rtol = max(float(rtol), 10 * eps)
    k0 = tuple(f(t0, y))
    sol.nfev = 1
    if h0 is None:
        d0 = _norm(y, y, y, rtol, atol)
        d1 = _norm(k0, y, y, rtol, atol)
        h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h = min(h, float(span))
    else:
        h = float(abs(h0))
    h = conv(F(h)) if number is mpf else h
    err_prev = 1e-4
    safety, beta, alpha = 0.9, 0.04, 0.2 - 0.04 * 0.75
    gvals = [ev.func(t0, y) for ev in events]
    t = t0
    for _ in range(max_steps):
        remaining = abs(t_end - t)
        if remaining == 0:
            break
        h_min = max(h_floor, h_min_factor * eps * max(1.0, abs(float(t))))
        if h < h_min:
            raise StiffSegmentError(
                f"step size {float(h):.3e} fell below {h_min:.3e} at t = {float(t):.6g}; "
                "the segment is stiff, integrate in the scaled chart")
        h_try = min(h, remaining)
        hs = direction * h_try
        ks = [k0]
        for i in range(1, 7):
            yi = tuple(y[c] + hs * sum(tab.a[i][j] * ks[j][c] for j in range(i) if tab.a[i][j] != 0)
                       for c in range(len(y)))
            ks.append(tuple(f(t + tab.c[i] * hs, yi)))
        sol.nfev += 6
        y_new = yi  # the last stage is evaluated at the fifth order solution
        err = tuple(hs * sum(tab.e[i] * ks[i][c] for i in range(7) if tab.e[i] != 0) for c in range(len(y)))
        en = _norm(err, y, y_new, rtol, atol)
        if not math.isfinite(en):
            h = h / 4
            sol.rejected += 1
            continue
        if en <= 1.0:
            t_new = t_end if h_try == remaining else t + hs
            seg = Segment(t, hs, y, tuple(ks))
            if keep_segments:
                sol.segments.append(seg)
            stop = False
            for idx, ev in enumerate(events):
                g_new = ev.func(t_new, y_new)
                g_old = gvals[idx]
                up = g_old < 0 <= g_new
                down = g_old > 0 >= g_new
                if (up and ev.direction >= 0) or (down and ev.direction <= 0):
                    te = _locate(ev, seg, tab.p, g_old, g_new, 64 * eps * max(1.0, abs(float(t_new))))
                    sol.events.append(EventRecord(ev.name, te, seg(te, tab.p)))
                    if ev.terminal:
                        stop = True
                gvals[idx] = g_new
            if stop:
                last = sol.events[-1]
                sol.ts.append(last.t)
                sol.ys.append(last.y)
                sol.status = "event"
                return sol
            t, y, k0 = t_new, y_new, ks[6]
            sol.ts.append(t)
            sol.ys.append(y)
            factor = safety * (max(en, 1e-10) ** -alpha) * (err_prev ** beta)
            factor = min(5.0, max(0.2, factor))
            err_prev = max(en, 1e-4)
            h = h * (conv(F(factor)) if number is mpf else factor)
        else:
            sol.rejected += 1
            factor = max(0.2, safety * en ** -alpha)
            h = h * (conv(F(factor)) if number is mpf else factor)
    else:
        raise StiffSegmentError(f"step budget of {max_steps} exhausted at t = {float(t):.6g}")
    return sol

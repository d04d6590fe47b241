"""Trajectories of the regularized system at moderate ``epsilon``.

The regularized field is ``Z+ phi(y / eps**2) + Z- (1 - phi(y / eps**2))``.
Two charts are available:

``"original"``
    State ``(x, y)`` and time ``t``.  The layer near the switching line has
    rate ``eps**-2``, so explicit integration becomes expensive as ``eps``
    shrinks.
``"scaled"``
    State ``(x, y2)`` with ``y = eps**2 y2`` and fast time ``tau = t / eps**2``:
    ``x' = eps**2 X`` and ``y2' = Y``.  Slow drift along the critical curve
    then proceeds at rate ``eps**2 X_sl``.

On top of plain integration the module locates the critical curve, measures
the transition maps between sections on ``x = 0`` (the difference map),
tunes the breaking parameter so that the transitions match, and searches
for limit cycles with a Newton iteration on the return map.  All of this is
restricted to ``eps >= 1e-2``; below that the contraction ``exp(I / eps**2)``
is far beyond double precision and the results carry no information.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Sequence

import mpmath
from mpmath import mpf
from scipy.optimize import brentq

from .errors import ConfigError, NoReturnError, NotSlidingError, StiffSegmentError
from .ode import Event, Solution, dopri45
from .precision import Number, big
from .pws import PWSSystem, filippov_field
from .regularization import RegularizationFunction
from .sdi import xi_map

__all__ = [
    "MIN_EPSILON",
    "SECTION_HALF_WIDTH",
    "RegularizedSystem",
    "Trajectory",
    "integrate",
    "critical_manifold",
    "section_center",
    "attraction_rate",
    "Transition",
    "transition",
    "DifferenceMapSample",
    "difference_map",
    "LambdaTuning",
    "tune_lambda",
    "Cycle",
    "CycleSearch",
    "return_map",
    "find_limit_cycles",
    "singular_cycle",
    "hausdorff_distance",
    "difference_map_csv",
]

log = logging.getLogger(__name__)

MIN_EPSILON = 1e-2
SECTION_HALF_WIDTH = 0.5
CHARTS = ("original", "scaled")


def _poly_evaluator(terms: Sequence[tuple[int, int, Any]]) -> Callable:
    """``(x, y) -> (P, P_x, P_y)`` for a list of monomials."""
    terms = list(terms)

    def ev(x, y):
        v = vx = vy = 0 * x
        for i, j, c in terms:
            xi = x ** i if i else 1
            yj = y ** j if j else 1
            v += c * xi * yj
            if i:
                vx += c * i * (x ** (i - 1) if i > 1 else 1) * yj
            if j:
                vy += c * j * xi * (y ** (j - 1) if j > 1 else 1)
        return v, vx, vy

    return ev


@dataclass(frozen=True)
class RegularizedSystem:
    """A piecewise smooth system together with its regularization.

    Parameters
    ----------
    sys : PWSSystem
    phi : RegularizationFunction
    epsilon : number
        Regularization scale; the transition happens for ``y = O(eps**2)``.
    lam_tilde : number
        Breaking parameter; the unfolding parameter is
        ``lam = lambda0 + eps * lam_tilde``.
    arithmetic : {"float", "mp"}
        Scalar type used for trajectories.
    """

    sys: PWSSystem
    phi: RegularizationFunction
    epsilon: Any
    lam_tilde: Any = 0
    arithmetic: str = "float"

    def __post_init__(self):
        eps = big(self.epsilon)
        if eps <= 0:
            raise ConfigError("epsilon must be positive")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "lam_tilde", big(self.lam_tilde))
        if self.arithmetic not in ("float", "mp"):
            raise ConfigError("arithmetic must be 'float' or 'mp'")

    @property
    def lam(self) -> mpf:
        return big(self.sys.lambda0) + self.epsilon * self.lam_tilde

    @property
    def number(self):
        return float if self.arithmetic == "float" else mpf

    def with_lam_tilde(self, value: Number) -> "RegularizedSystem":
        return replace(self, lam_tilde=big(value))

    def with_epsilon(self, value: Number) -> "RegularizedSystem":
        return replace(self, epsilon=big(value))

    def require_moderate(self) -> None:
        if self.epsilon < MIN_EPSILON:
            raise ConfigError(
                f"epsilon = {mpmath.nstr(self.epsilon, 6)} is below {MIN_EPSILON}: the contraction "
                "exp(I / eps**2) along the slow manifolds is then beyond double precision and "
                "transition maps cannot be resolved")

    @cached_property
    def _core(self):
        num = self.number
        lam = float(self.lam) if num is float else self.lam
        conv = float if num is float else big
        fields = []
        for vf in (self.sys.zplus, self.sys.zminus):
            fields.append(tuple(
                _poly_evaluator([(i, j, conv(a) + conv(b) * lam) for (i, j), (a, b) in comp.terms.items()])
                for comp in (vf.X, vf.Y)))
        if num is float:
            phi_ev = self.phi.float_evaluator()
        else:
            def phi_ev(s):
                d = self.phi.derivatives(s, 1)
                return d[0], d[1]
        eps2 = float(self.epsilon) ** 2 if num is float else self.epsilon ** 2
        (Xp, Yp), (Xm, Ym) = fields

        def core(x, y):
            """Field and Jacobian in the original chart at ``(x, y)``."""
            s = y / eps2
            ph, dph = phi_ev(s)
            q = 1 - ph
            xp, xpx, xpy = Xp(x, y)
            xm, xmx, xmy = Xm(x, y)
            yp, ypx, ypy = Yp(x, y)
            ym, ymx, ymy = Ym(x, y)
            fx = xp * ph + xm * q
            fy = yp * ph + ym * q
            jxx = xpx * ph + xmx * q
            jyx = ypx * ph + ymx * q
            jxy = xpy * ph + xmy * q + (xp - xm) * dph / eps2
            jyy = ypy * ph + ymy * q + (yp - ym) * dph / eps2
            return fx, fy, jxx, jxy, jyx, jyy

        return core, eps2

    def field(self, z, chart: str = "scaled"):
        """Vector field at ``z`` in the given chart."""
        core, eps2 = self._core
        if chart == "original":
            return core(z[0], z[1])[:2]
        fx, fy, *_ = core(z[0], eps2 * z[1])
        return eps2 * fx, fy

    def jacobian(self, z, chart: str = "scaled"):
        """``(F, J)`` with ``J`` as nested tuples, in the given chart."""
        core, eps2 = self._core
        if chart == "original":
            fx, fy, jxx, jxy, jyx, jyy = core(z[0], z[1])
            return (fx, fy), ((jxx, jxy), (jyx, jyy))
        fx, fy, jxx, jxy, jyx, jyy = core(z[0], eps2 * z[1])
        return (eps2 * fx, fy), ((eps2 * jxx, eps2 * eps2 * jxy), (jyx, eps2 * jyy))

    def divergence(self, z, chart: str = "scaled"):
        _, J = self.jacobian(z, chart)
        return J[0][0] + J[1][1]

    def rhs(self, chart: str = "scaled", variational: bool = False) -> Callable:
        """Right-hand side for :func:`dopri45`.

        With ``variational=True`` the state is extended by a unit tangent
        ``(u1, u2)``, the logarithm of the tangent growth and the time
        integral of the divergence.
        """
        if chart not in CHARTS:
            raise ConfigError(f"chart must be one of {CHARTS}")
        if not variational:
            def f(t, z):
                return self.field(z, chart)
            return f

        def fv(t, z):
            (f1, f2), ((a, b), (c, d)) = self.jacobian(z, chart)
            u1, u2 = z[2], z[3]
            w1, w2 = a * u1 + b * u2, c * u1 + d * u2
            r = u1 * w1 + u2 * w2
            return f1, f2, w1 - r * u1, w2 - r * u2, r, a + d
        return fv


@dataclass
class Trajectory:
    """Integrated orbit with dense output and the events met on the way."""

    chart: str
    solution: Solution
    epsilon: mpf
    variational: bool = False

    @property
    def times(self) -> list:
        return self.solution.ts

    @property
    def states(self) -> list:
        return self.solution.ys

    @property
    def events(self) -> list:
        return self.solution.events

    @property
    def final(self) -> tuple:
        return self.solution.y_final

    def __call__(self, t):
        return self.solution(t)

    def original_points(self) -> list[tuple[float, float]]:
        """Nodes as ``(x, y)`` in the original chart."""
        e2 = float(self.epsilon) ** 2
        if self.chart == "original":
            return [(float(z[0]), float(z[1])) for z in self.states]
        return [(float(z[0]), e2 * float(z[1])) for z in self.states]

    def to_csv(self) -> str:
        """CSV text with columns ``t, x, y`` or ``t, x, y2``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        second = "y" if self.chart == "original" else "y2"
        w.writerow(["t", "x", second])
        for t, z in zip(self.times, self.states):
            w.writerow([repr(float(t)), repr(float(z[0])), repr(float(z[1]))])
        return buf.getvalue()


def integrate(rs: RegularizedSystem, z0: Sequence[Number], tmax: Number, tol: float = 1e-10,
              chart: str = "scaled", events: Sequence[Event] = (), variational: bool = False,
              max_steps: int = 400000, h_floor: float | None = None) -> Trajectory:
    """Integrate the regularized system from ``z0`` for time ``tmax``.

    ``tmax`` may be negative.  In the original chart a step floor of
    ``|tmax| * 1e-9`` guards against the fast layer; hitting it raises
    :class:`StiffSegmentError` with the advice to switch charts.
    """
    if chart not in CHARTS:
        raise ConfigError(f"chart must be one of {CHARTS}")
    if tol <= 0:
        raise ConfigError("tol must be positive")
    num = rs.number
    z = [num(v) if num is float else big(v) for v in z0]
    if variational:
        if len(z) == 2:
            z += [num(0), num(1), num(0), num(0)] if num is float else [mpf(0), mpf(1), mpf(0), mpf(0)]
        elif len(z) != 6:
            raise ConfigError("variational state has six entries")
    if h_floor is None:
        h_floor = abs(float(tmax)) * 1e-9 if chart == "original" else 0.0
    try:
        sol = dopri45(rs.rhs(chart, variational), 0, z, tmax, rtol=tol, atol=tol, events=events,
                      number=num, max_steps=max_steps, h_floor=h_floor)
    except StiffSegmentError as exc:
        if chart == "original":
            raise StiffSegmentError(f"{exc}; the original chart resolves the O(eps**-2) layer poorly") from exc
        raise
    return Trajectory(chart, sol, rs.epsilon, variational)


def critical_manifold(rs: RegularizedSystem, x: Number) -> mpf:
    """Height ``y2`` of the critical curve above ``(x, 0)``.

    Raises
    ------
    NotSlidingError
        When ``(x, 0)`` is a crossing point.
    """
    _, weight = filippov_field(rs.sys, x, rs.lam)
    return rs.phi.inverse(weight)


def section_center(rs: RegularizedSystem) -> mpf:
    """Height ``y2c`` of the critical curve over the two-fold at ``lambda0``.

    The transition sections are centred here for every value of the
    breaking parameter.
    """
    return critical_manifold(rs.with_lam_tilde(0), 0)


def attraction_rate(rs: RegularizedSystem, x: Number) -> mpf:
    """Nontrivial eigenvalue ``(Y+ - Y-) phi'(y2)`` of the layer at ``x``.

    Negative values mean that the critical curve attracts in the scaled
    chart, positive values that it repels.
    """
    x = big(x)
    y2 = critical_manifold(rs, x)
    yp = rs.sys.zplus.Y.evaluate(x, 0, rs.lam)
    ym = rs.sys.zminus.Y.evaluate(x, 0, rs.lam)
    return (yp - ym) * rs.phi.derivative(y2, 1)


# sections and transitions -------------------------------------------------------

def _escape_events(rs: RegularizedSystem) -> list[Event]:
    lo, hi = (float(v) for v in rs.sys.domain)
    xbox = 2 * max(abs(lo), abs(hi))
    ybox = 4 * max(abs(lo), abs(hi)) ** 2 + 1
    e2 = float(rs.epsilon) ** 2
    return [
        Event(lambda t, z: xbox - abs(z[0]), -1, True, "escape_x"),
        Event(lambda t, z: ybox - abs(e2 * z[1]), -1, True, "escape_y"),
    ]


def _section_derivative(rs: RegularizedSystem, z) -> tuple[float, float]:
    """Sign and log magnitude of ``d y2_hit / d y2_start`` from the unit tangent.

    The difference ``u2 - F2 u1 / F1`` cancels once the contraction passes
    rounding level, so this estimate is only a cross-check.
    """
    f1, f2 = rs.field(z[:2], "scaled")
    factor = z[3] - f2 / f1 * z[2]
    if factor == 0:
        return 0.0, -math.inf
    return (1.0 if factor > 0 else -1.0), float(z[4]) + math.log(abs(float(factor)))


def _liouville_log_derivative(rs: RegularizedSystem, start, end, divergence: float) -> float:
    """``log |d y2_hit / d y2_start|`` between two hits of ``x = 0``.

    For a planar flow the derivative of the passage map between sections
    transverse to the field equals ``exp(int div)`` times the ratio of the
    normal field components at start and end.
    """
    f_start = rs.field(start[:2], "scaled")[0]
    f_end = rs.field(end[:2], "scaled")[0]
    return divergence + math.log(abs(float(f_start) / float(f_end)))


@dataclass(frozen=True)
class Transition:
    """Passage from ``(0, y)`` to the next hit of the section ``x = 0``.

    ``log_derivative`` is ``log |d y2_hit / d y|`` with ``y`` in the original
    chart, from the divergence integral; ``tangent_log_derivative`` is the
    same quantity from the variational equation.  ``divergence`` is the time
    integral of the divergence.
    """

    y_start: float
    y2_hit: float
    time: float
    log_derivative: float
    tangent_log_derivative: float
    divergence: float
    in_window: bool


def transition(rs: RegularizedSystem, y: Number, direction: str = "forward", tol: float = 1e-10,
               window: float = SECTION_HALF_WIDTH, tmax: float | None = None,
               max_steps: int = 400000) -> Transition:
    """Follow the orbit through ``(0, y)`` with ``y < 0`` to the section near ``y2c``.

    ``direction="forward"`` gives the passage along the attracting slow
    manifold (x returns to 0 increasing); ``"backward"`` integrates in
    negative time along the repelling one.

    Raises
    ------
    NoReturnError
        When the orbit leaves the domain box or misses the section.
    """
    if direction not in ("forward", "backward"):
        raise ConfigError("direction must be 'forward' or 'backward'")
    y = float(y)
    if y >= 0:
        raise ConfigError("transition starts below the switching line (y < 0)")
    e2 = float(rs.epsilon) ** 2
    tmax = 200.0 / e2 if tmax is None else tmax
    sign = 1 if direction == "forward" else -1
    hit = Event(lambda t, z: z[0], sign, True, "section")
    traj = integrate(rs, (0.0, y / e2, 0.0, 1.0, 0.0, 0.0), sign * tmax, tol, "scaled",
                     events=[hit] + _escape_events(rs), variational=True, max_steps=max_steps)
    if traj.solution.status != "event" or traj.events[-1].name != "section":
        why = traj.events[-1].name if traj.events else "time limit"
        raise NoReturnError(f"orbit from (0, {y}) did not return to x = 0 ({why})")
    z = traj.final
    y2c = float(section_center(rs))
    _, tangent_log = _section_derivative(rs, z)
    liouville = _liouville_log_derivative(rs, traj.states[0], z, float(z[5]))
    shift = math.log(e2)
    return Transition(y, float(z[1]), float(traj.times[-1]), liouville - shift, tangent_log - shift,
                      float(z[5]), abs(float(z[1]) - y2c) <= window)


@dataclass(frozen=True)
class DifferenceMapSample:
    """Forward and backward transitions from ``(0, y)`` and their difference."""

    y: float
    delta_minus: float
    delta_plus: float
    lam_tilde: float
    epsilon: float
    minus: Transition | None = None
    plus: Transition | None = None

    @property
    def delta(self) -> float:
        return self.delta_minus - self.delta_plus


def difference_map(rs: RegularizedSystem, y: Number, tol: float = 1e-10,
                   window: float = SECTION_HALF_WIDTH, require_window: bool = True) -> DifferenceMapSample:
    """``Delta(y) = Delta_-(y) - Delta_+(y)`` for the orbit through ``(0, y)``.

    Raises
    ------
    NoReturnError
        When either transition escapes or, with ``require_window``, lands
        outside ``|y2 - y2c| <= window``.
    """
    rs.require_moderate()
    minus = transition(rs, y, "forward", tol, window)
    plus = transition(rs, y, "backward", tol, window)
    if require_window and not (minus.in_window and plus.in_window):
        raise NoReturnError(
            f"transitions from y = {float(y)} land at y2 = {minus.y2_hit:.6g}, {plus.y2_hit:.6g}, "
            f"outside the section of half width {window}")
    return DifferenceMapSample(float(y), minus.y2_hit, plus.y2_hit, float(rs.lam_tilde),
                               float(rs.epsilon), minus, plus)


def difference_map_csv(samples: Sequence[DifferenceMapSample]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["y", "delta_minus", "delta_plus", "delta"])
    for s in samples:
        w.writerow([repr(s.y), repr(s.delta_minus), repr(s.delta_plus), repr(s.delta)])
    return buf.getvalue()


@dataclass(frozen=True)
class LambdaTuning:
    """Breaking parameter for which the forward and backward transitions meet."""

    lam_tilde: float
    lam: float
    epsilon: float
    y_ref: float
    residual: float
    scan: tuple

    def to_json(self) -> dict:
        return {"lam_tilde": self.lam_tilde, "lam": self.lam, "epsilon": self.epsilon, "y_ref": self.y_ref,
                "residual": self.residual, "scan": [list(p) for p in self.scan]}


def tune_lambda(rs: RegularizedSystem, y_ref: Number, bracket: tuple = (-0.5, 0.5), n_scan: int = 21,
                tol: float = 1e-10) -> LambdaTuning:
    """Root of ``lam_tilde -> Delta(y_ref)`` found by scan plus Brent's method.

    Raises
    ------
    NoReturnError
        When the scan shows no sign change; the scan data are included in
        the message.
    """
    rs.require_moderate()
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi or n_scan < 2:
        raise ConfigError("lambda bracket must satisfy lo < hi with at least two scan points")

    def delta_at(lt):
        return difference_map(rs.with_lam_tilde(lt), y_ref, tol, require_window=False).delta

    grid = [lo + (hi - lo) * j / (n_scan - 1) for j in range(n_scan)]
    scan = []
    for lt in grid:
        try:
            scan.append((lt, delta_at(lt)))
        except NoReturnError as exc:
            log.info("lambda scan point %g skipped: %s", lt, exc)
    for (a, fa), (b, fb) in zip(scan, scan[1:]):
        if fa == 0:
            root = a
            break
        if fa * fb < 0:
            root = brentq(delta_at, a, b, xtol=max(tol, 1e-12), rtol=4 * 2.0 ** -52)
            break
    else:
        raise NoReturnError(f"Delta(y_ref) has no sign change over lam_tilde in {bracket}; scan: {scan}")
    res = delta_at(root)
    return LambdaTuning(root, float(rs.sys.lambda0) + float(rs.epsilon) * root, float(rs.epsilon),
                        float(y_ref), res, tuple(scan))


# limit cycles -------------------------------------------------------------------

@dataclass(frozen=True)
class ReturnSample:
    """One application of the return map.

    ``derivative`` comes from the divergence integral; ``tangent_derivative``
    from the variational equation.
    """

    y: float
    image: float
    log_derivative: float
    tangent_derivative: float
    divergence: float
    period: float
    trajectory: Trajectory | None = None

    @property
    def derivative(self) -> float:
        return math.exp(self.log_derivative)


def return_map(rs: RegularizedSystem, y: Number, tol: float = 1e-10, keep_trajectory: bool = False,
               max_steps: int = 400000) -> ReturnSample:
    """First return to ``{x = 0, y < 0}`` crossing leftwards, from ``(0, y)``.

    Raises
    ------
    NoReturnError
        When the orbit escapes or does not come back in time.
    """
    y = float(y)
    if y >= 0:
        raise ConfigError("the return section lies below the switching line (y < 0)")
    e2 = float(rs.epsilon) ** 2
    hit = Event(lambda t, z: z[0] if z[1] < 0 else 1.0, -1, True, "section")
    traj = integrate(rs, (0.0, y / e2, 0.0, 1.0, 0.0, 0.0), 400.0 / e2, tol, "scaled",
                     events=[hit] + _escape_events(rs), variational=True, max_steps=max_steps)
    if traj.solution.status != "event" or traj.events[-1].name != "section":
        why = traj.events[-1].name if traj.events else "time limit"
        raise NoReturnError(f"orbit from (0, {y}) did not return ({why})")
    z = traj.final
    sgn, lg = _section_derivative(rs, z)
    tangent = sgn * math.exp(lg) if lg > -700 else 0.0
    liouville = _liouville_log_derivative(rs, traj.states[0], z, float(z[5]))
    return ReturnSample(y, e2 * float(z[1]), liouville, tangent, float(z[5]), float(traj.times[-1]),
                        traj if keep_trajectory else None)


@dataclass(frozen=True)
class Cycle:
    """Fixed point of the return map with three multiplier estimates."""

    y: float
    period: float
    multiplier_divergence: float
    multiplier_variational: float
    multiplier_difference: float | None
    residual: float
    points: tuple = ()

    @property
    def stable(self) -> bool:
        return self.multiplier_divergence < 1

    def to_json(self) -> dict:
        return {"y": self.y, "period": self.period, "multiplier_divergence": self.multiplier_divergence,
                "multiplier_variational": self.multiplier_variational,
                "multiplier_difference": self.multiplier_difference, "residual": self.residual,
                "stable": self.stable}


@dataclass
class CycleSearch:
    cycles: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"cycles": [c.to_json() for c in self.cycles],
                "skipped": [{"seed": s, "reason": r} for s, r in self.skipped]}


def _newton_cycle(rs, y, tol, max_iter, y_max):
    for _ in range(max_iter):
        r = return_map(rs, y, tol)
        g = r.image - y
        if abs(g) <= 1e3 * tol * max(1.0, abs(y)):
            return y, r
        d = r.derivative - 1
        step = g / d if d != 0 else g
        y_new = y - step
        if y_new >= 0 or y_new < -y_max:
            # damp towards the image, which stays on the section
            y_new = 0.5 * (y + min(r.image, -1e-12))
        y = y_new
    raise NoReturnError(f"Newton iteration did not converge from the seed (last y = {y})")


def find_limit_cycles(rs: RegularizedSystem, y_range: tuple = (-0.3, -0.01), n_seeds: int = 8,
                      tol: float = 1e-11, max_iter: int = 40, fd_step: float | None = None,
                      keep_points: bool = True, seeds: Sequence[float] | None = None) -> CycleSearch:
    """Seeded Newton search for fixed points of the return map.

    The multiplier of each cycle is reported as ``exp`` of the divergence
    integral over one period, from the variational equation, and from a
    central difference of the return map (``None`` when the difference is
    below rounding level).  Seeds are spread uniformly over ``y_range``
    unless given explicitly; seeds that escape or fail to converge are
    skipped and logged.
    """
    rs.require_moderate()
    lo, hi = float(y_range[0]), float(y_range[1])
    if not lo < hi < 0:
        raise ConfigError("seed range must lie below the switching line and satisfy lo < hi")
    out = CycleSearch()
    if seeds is None:
        seeds = [lo + (hi - lo) * j / (n_seeds - 1) for j in range(n_seeds)] if n_seeds > 1 else [0.5 * (lo + hi)]
    seeds = [float(v) for v in seeds]
    y_max = 4 * max(abs(float(v)) for v in rs.sys.domain) ** 2 + 1
    for seed in seeds:
        try:
            y, r = _newton_cycle(rs, seed, tol, max_iter, y_max)
        except (NoReturnError, StiffSegmentError, NotSlidingError, ZeroDivisionError, OverflowError) as exc:
            log.info("seed %g skipped: %s", seed, exc)
            out.skipped.append((seed, str(exc)))
            continue
        if any(abs(c.y - y) <= 1e-6 * max(1.0, abs(y)) for c in out.cycles):
            continue
        h = fd_step if fd_step is not None else 1e-3 * max(abs(y), 1e-3)
        mult_fd = None
        try:
            up, dn = return_map(rs, y + h, tol).image, return_map(rs, y - h, tol).image
            if abs(up - dn) > 1e2 * tol:
                mult_fd = (up - dn) / (2 * h)
        except NoReturnError as exc:
            log.info("difference estimate skipped at y = %g: %s", y, exc)
        points = ()
        if keep_points:
            rr = return_map(rs, y, tol, keep_trajectory=True)
            points = tuple(rr.trajectory.original_points())
        out.cycles.append(Cycle(y, r.period, math.exp(r.divergence), r.tangent_derivative, mult_fd,
                                r.image - y, points))
    return out


def singular_cycle(sys: PWSSystem, x: Number, n: int = 400) -> list[tuple[float, float]]:
    """Points of the singular canard cycle through ``(x, 0)`` with ``x > 0``.

    The cycle is the switching line segment ``[xi(x), x]`` together with the
    orbit of the lower field from ``(x, 0)`` back to ``(xi(x), 0)``.
    """
    x = big(x)
    if x <= 0:
        raise ConfigError("the singular cycle is parametrized by x > 0")
    left = xi_map(sys, x, "forward")
    pts = [(float(left + (x - left) * j / n), 0.0) for j in range(n + 1)]
    lower_x = sys.zminus.X.evaluate
    lower_y = sys.zminus.Y.evaluate
    lam = sys.lambda0

    def rhs(t, z):
        return [float(lower_x(z[0], z[1], lam)), float(lower_y(z[0], z[1], lam))]

    speed = abs(float(lower_x(x, 0, lam))) or 1.0
    ev = Event(lambda t, z: z[1], 1, True, "land")
    sol = dopri45(rhs, 0.0, (float(x), 0.0), 100.0 * float(x - left) / speed + 10.0, rtol=1e-10, atol=1e-12,
                  events=[ev])
    for t in (sol.ts[0] + (sol.ts[-1] - sol.ts[0]) * j / n for j in range(n + 1)):
        z = sol(t)
        pts.append((float(z[0]), float(z[1])))
    return pts


def hausdorff_distance(a: Sequence[tuple[float, float]], b: Sequence[tuple[float, float]]) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    def one_sided(p, q):
        return max(min(math.hypot(u[0] - v[0], u[1] - v[1]) for v in q) for u in p)
    return max(one_sided(a, b), one_sided(b, a))


def cycle_report_json(search: CycleSearch, rs: RegularizedSystem) -> str:
    data = {"epsilon": float(rs.epsilon), "lam_tilde": float(rs.lam_tilde), "lam": float(rs.lam)}
    data.update(search.to_json())
    return json.dumps(data, indent=2, sort_keys=True)

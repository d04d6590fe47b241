"""Slow divergence integral along canard cycles.

For ``x > 0`` the canard cycle through ``(x, 0)`` consists of the sliding
segment ``[xi(x), x]`` on the switching line and the arc of the lower field
joining ``(x, 0)`` to ``(xi(x), 0)``.  The slow divergence integral is

    I(x) = int_{xi(x)}^{x} w(u) * phi'(phi^{-1}(p(u))) du

where ``p`` is the Filippov weight and ``w = (Y+ - Y-)**2 / det`` along the
switching line.  ``I`` is evaluated in two independent ways: by tanh-sinh
quadrature, and by truncated Taylor series built from the jet of ``phi`` at
the height ``y2c = phi^{-1}(p(0))``.  The series route is the only practical
one when ``I`` is of size ``1e-85``, because all of the information then lives
in high order Taylor coefficients.

The module also provides the one sided integrals over the two halves of
the segment, the rescaled integral used to locate roots near
``delta * sqrt(i)``, and a generic simple root finder.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
from mpmath import mp, mpf

from .errors import (
    ConfigError,
    InsufficientDerivativesError,
    NoReturnError,
    NonMonotoneError,
    SeriesTruncationError,
)
from .precision import Number, big
from .pws import PWSSystem
from .quadrature import quadrature
from .regularization import RegularizationFunction
from .series import TruncatedSeries

__all__ = [
    "xi_map",
    "sdi_integrand",
    "sdi_quadrature",
    "SDIExpansion",
    "sdi_expansion",
    "sdi_series",
    "sdi_ipm",
    "scaled_I2",
    "scaled_I2_series",
    "Root",
    "find_simple_roots",
    "SDIProfile",
    "build_profile",
]

NEAR_ZERO = mpf("1e-8")
_DIRECTIONS = {
    "forward": "forward",
    "forward-from-positive-x": "forward",
    "xi": "forward",
    "xi_minus": "xi_minus",
    "xi_minus_of_y": "xi_minus",
    "xi_plus": "xi_plus",
    "xi_plus_of_y": "xi_plus",
}


# lower arc return maps ----------------------------------------------------------

def _parabolic_data(sys: PWSSystem):
    """``(a, e)`` when the lower field is ``(a, e x)`` at ``lambda0``, else ``None``."""
    lam = sys.lambda0
    xt = {(i, j): c for i, j, c in sys.zminus.X.exact_terms(lam)}
    yt = {(i, j): c for i, j, c in sys.zminus.Y.exact_terms(lam)}
    if set(xt) - {(0, 0)} or set(yt) - {(1, 0)}:
        return None
    a, e = xt.get((0, 0), Fraction(0)), yt.get((1, 0), Fraction(0))
    if a == 0 or e == 0:
        return None
    return big(a), big(e)


def _lower_field(sys: PWSSystem):
    xterms = [(i, j, big(c)) for i, j, c in sys.zminus.X.exact_terms(sys.lambda0)]
    yterms = [(i, j, big(c)) for i, j, c in sys.zminus.Y.exact_terms(sys.lambda0)]

    def ev(terms, x, y):
        return mpmath.fsum(c * x**i * y**j for i, j, c in terms)

    return lambda x, y: (ev(xterms, x, y), ev(yterms, x, y))


def _numeric_return(sys: PWSSystem, x0: mpf, y0: mpf, time_sign: int, skip_start: bool) -> mpf:
    field_ = _lower_field(sys)
    lo, hi = (big(v) for v in sys.domain)
    box = 4 * max(hi - lo, abs(y0), mpf(1))

    def rhs(t, z):
        fx, fy = field_(z[0], z[1])
        return [time_sign * fx, time_sign * fy]

    sol = mpmath.odefun(rhs, 0, [x0, y0])
    speed = max(abs(v) for v in field_(x0, y0)) or mpf(1)
    size = max(abs(x0), abs(y0), mpmath.sqrt(abs(y0)))
    dt = size / (20 * speed)
    t_prev = mpf(0)
    y_prev = y0
    t = mpf(0)
    for step in range(1, 2000):
        t = t + dt
        dt *= mpf("1.02")
        x, y = sol(t)
        if abs(x) > box or abs(y) > box:
            raise NoReturnError("lower arc leaves the domain box before returning to the switching line")
        if skip_start and step == 1 and y >= 0:
            raise NoReturnError("lower arc does not enter y < 0")
        if y >= 0 and y_prev < 0:
            t_hit = mpmath.findroot(lambda s: sol(s)[1], (t_prev, t), solver="illinois",
                                    tol=mpf(10) ** (-(2 * mp.dps - 20)), maxsteps=400)
            return sol(t_hit)[0]
        t_prev, y_prev = t, y
    raise NoReturnError("lower arc did not return within the time budget")


def xi_map(sys: PWSSystem, x: Number, direction: str = "forward", method: str = "auto") -> mpf:
    """Landing points of arcs of the lower field on the switching line.

    Parameters
    ----------
    sys : PWSSystem
        The system; the lower field is evaluated at ``lambda0``.
    x : number
        For ``direction="forward"`` a point ``x`` on the switching line, and
        the result is the other end of the lower arc through ``(x, 0)``.
        For ``"xi_minus"`` and ``"xi_plus"`` a height ``y < 0`` on the
        vertical line ``x = 0``, and the result is where the lower orbit
        through ``(0, y)`` meets the switching line on the negative or
        positive side.
    direction : str
        One of ``"forward"``, ``"xi_minus"``, ``"xi_plus"``.
    method : {"auto", "closed", "numeric"}
        ``"closed"`` uses the parabolic orbits of a lower field of the form
        ``(a, e x)``; ``"numeric"`` integrates the lower field at working
        precision with a Taylor method; ``"auto"`` picks the closed form when
        it applies.

    Raises
    ------
    NoReturnError
        When the arc never comes back to the switching line.
    """
    try:
        direction = _DIRECTIONS[direction]
    except KeyError as exc:
        raise ConfigError(f"unknown direction {direction!r}") from exc
    x = big(x)
    para = _parabolic_data(sys)
    if method == "closed" and para is None:
        raise ConfigError("closed form return map needs a lower field of the form (a, e x)")
    use_closed = para is not None and method in ("auto", "closed")
    if direction == "forward":
        if x == 0:
            return mpf(0)
        if use_closed:
            a, e = para
            if e / a <= 0:
                raise NoReturnError("lower orbits open upward; no arc below the switching line")
            return -x
        fx, fy = _lower_field(sys)(x, mpf(0))
        if fy == 0:
            raise NoReturnError("lower field is tangent to the switching line at this point")
        return _numeric_return(sys, x, mpf(0), 1 if fy < 0 else -1, True)
    if x >= 0:
        raise ConfigError("xi_minus and xi_plus take a negative height")
    if use_closed:
        a, e = para
        sq = -2 * a * x / e
        if sq <= 0:
            raise NoReturnError("orbit through this height does not meet the switching line")
        r = mpmath.sqrt(sq)
        return r if direction == "xi_plus" else -r
    fx, _ = _lower_field(sys)(mpf(0), x)
    if fx == 0:
        raise NoReturnError("lower field has no horizontal component on x = 0")
    want_right = direction == "xi_plus"
    sign = 1 if (fx > 0) == want_right else -1
    return _numeric_return(sys, mpf(0), x, sign, False)


# integrand and quadrature -------------------------------------------------------------

def sdi_integrand(sys: PWSSystem, phi: RegularizationFunction, u: Number,
                  expansion: "SDIExpansion | None" = None) -> mpf:
    """Integrand of the slow divergence integral at a point of the segment.

    Within ``|u| < 1e-8`` the value comes from the integrand series, which
    needs ``expansion`` (built on demand otherwise).
    """
    u = big(u)
    if abs(u) < NEAR_ZERO:
        if expansion is None:
            expansion = sdi_expansion(sys, phi, 17)
        return expansion.integrand.evaluate(u)
    sf = sys.sliding_functions()
    y = phi.inverse(sf.weight(u))
    slope = phi.derivative(y, 1)
    if slope <= 0:
        raise NonMonotoneError(f"regularization slope is not positive at y = {mpmath.nstr(y, 12)}")
    return sf.divergence_weight(u) * slope


def _default_tol() -> mpf:
    return mpf(10) ** (-(mp.dps - 20))


def sdi_quadrature(sys: PWSSystem, phi: RegularizationFunction, x: Number,
                   tol: Number | None = None, xi_method: str = "auto") -> mpf:
    """Slow divergence integral by adaptive quadrature.

    The interval ``[xi(x), x]`` is split at ``0`` where the integrand has its
    removable singularity.  Negative ``x`` is accepted and integrates over
    ``[xi(x), x]`` in the same orientation, so that oddness can be tested.
    """
    x = big(x)
    tol = _default_tol() if tol is None else big(tol)
    if x == 0:
        return mpf(0)
    xi = xi_map(sys, x, "forward", xi_method)
    expansion = sdi_expansion(sys, phi, 17)
    f = lambda u: sdi_integrand(sys, phi, u, expansion)  # noqa: E731
    return quadrature(f, xi, x, tol, breakpoints=[mpf(0)])


# series route ---------------------------------------------------------------------

@dataclass(frozen=True)
class SDIExpansion:
    """Taylor data of the slow divergence integral around ``x = 0``.

    Attributes
    ----------
    weight : TruncatedSeries
        Filippov weight ``p(u)``.
    height : TruncatedSeries
        Critical height ``g(u) = phi^{-1}(p(u))``; its constant is ``y2c``.
    divergence_weight : TruncatedSeries
        ``(Y+ - Y-)**2 / det``.
    integrand : TruncatedSeries
        Product of the divergence weight with ``phi'(g(u))``.
    integral : TruncatedSeries
        The slow divergence integral ``I(x)`` itself.
    jet : list of mpf
        Derivatives of ``phi`` at ``y2c`` that entered the computation.
    """

    weight: TruncatedSeries
    height: TruncatedSeries
    divergence_weight: TruncatedSeries
    integrand: TruncatedSeries
    integral: TruncatedSeries
    jet: tuple
    y2c: mpf

    @property
    def order(self) -> int:
        return self.integral.order

    def derivative_at_zero(self, n: int) -> mpf:
        return self.integral.derivative_at_center(n)


def _requires_symmetry(sys: PWSSystem) -> None:
    lam = sys.lambda0
    bad = any(i % 2 == 1 for i, j, c in sys.zminus.X.exact_terms(lam)) or \
        any(i % 2 == 0 for i, j, c in sys.zminus.Y.exact_terms(lam))
    if bad:
        raise ConfigError("the series route needs the reflection symmetry of the lower field")


def sdi_expansion(sys: PWSSystem, phi: RegularizationFunction | None, order: int,
                  jet: Sequence[Number] | None = None, y2c: Number | None = None) -> SDIExpansion:
    """Build the Taylor expansion of ``I`` up to ``x**order``.

    Parameters
    ----------
    sys : PWSSystem
        Must have the two-fold at the origin and the reflection symmetry.
    phi : RegularizationFunction or None
        Source of the derivative jet at ``y2c``.
    order : int
        Highest power of ``x`` kept in ``I``.
    jet : sequence of numbers, optional
        Explicit derivatives ``phi(y2c), phi'(y2c), ...`` used instead of
        ``phi``.  At least ``order`` entries are needed.
    y2c : number, optional
        Expansion height; with ``phi`` given it defaults to
        ``phi^{-1}(p(0))``.
    """
    if order < 1:
        raise ConfigError("series order must be at least 1")
    _requires_symmetry(sys)
    sf = sys.sliding_functions()
    if not sf.reduced:
        raise ConfigError("the origin is not a two-fold of the system")
    m = order - 1
    p = sf.weight_series(m)
    p0 = p.coeffs[0]
    if jet is None:
        if phi is None:
            raise ConfigError("either phi or an explicit jet is required")
        center = phi.inverse(p0) if y2c is None else big(y2c)
        derivs = phi.derivatives(center, m)
    else:
        derivs = [big(d) for d in jet]
        if len(derivs) < m + 1:
            raise InsufficientDerivativesError(
                f"series of order {order} needs derivatives 0..{m} at the critical height, got {len(derivs)}")
        derivs = derivs[: m + 1]
        center = big(y2c) if y2c is not None else (phi.inverse(p0) if phi is not None else None)
        if center is None:
            raise ConfigError("y2c is required with an explicit jet")
    if abs(derivs[0] - p0) > mpf(10) ** (-(mp.dps // 2)):
        raise ConfigError("jet value at the critical height does not match the sliding weight")
    if m == 0:
        g = TruncatedSeries([center], 0, 0)
        q = TruncatedSeries([derivs[0] * 0], 0, 0)
    else:
        local = TruncatedSeries.from_derivatives(derivs, center, m)
        inv = local.reversion()
        g = TruncatedSeries(inv.coeffs, p0, m).compose(p)
        # the divergence weight vanishes at 0, so phi' is only needed to order m - 1
        slope = TruncatedSeries([derivs[j + 1] / mpmath.factorial(j) for j in range(m)], center, m)
        q = slope.compose(g)
    w = sf.divergence_weight_series(m)
    integrand = (w * q).with_order(m)
    antider = integrand.integral()
    odd = TruncatedSeries([2 * c if j % 2 else 0 for j, c in enumerate(antider.coeffs)], 0, order)
    return SDIExpansion(p, g, w, integrand, odd, tuple(derivs), center)


def sdi_series(sys: PWSSystem, phi: RegularizationFunction, order: int = 25) -> TruncatedSeries:
    """Taylor series of the slow divergence integral about ``x = 0``."""
    return sdi_expansion(sys, phi, order).integral


def sdi_ipm(sys: PWSSystem, phi: RegularizationFunction, y: Number,
            tol: Number | None = None) -> tuple[mpf, mpf]:
    """One sided integrals from the landing points of the orbit through ``(0, y)``.

    Returns
    -------
    (mpf, mpf)
        ``(I_minus, I_plus)`` with ``I_minus`` integrated from the negative
        landing point to ``0`` and ``I_plus`` from the positive one to ``0``.
        Both are negative.
    """
    y = big(y)
    tol = _default_tol() if tol is None else big(tol)
    xm = xi_map(sys, y, "xi_minus")
    xp = xi_map(sys, y, "xi_plus")
    expansion = sdi_expansion(sys, phi, 17)
    f = lambda u: sdi_integrand(sys, phi, u, expansion)  # noqa: E731
    return quadrature(f, xm, 0, tol), quadrature(f, xp, 0, tol)


def scaled_I2_series(series: TruncatedSeries, x2: Number, delta: Number, k: int,
                     truncation_tol: Number = mpf("1e-6")) -> mpf:
    """``delta**(-2k-1) x2**(-3) I(delta x2)`` from odd Taylor coefficients.

    Raises
    ------
    SeriesTruncationError
        When the last retained term is not negligible.
    """
    x2, delta = big(x2), big(delta)
    terms = []
    for j in range(1, (series.order - 1) // 2 + 1):
        terms.append(series.coeffs[2 * j + 1] * delta ** (2 * j - 2 * k) * x2 ** (2 * j - 2))
    total = mpmath.fsum(terms)
    if terms and abs(terms[-1]) > big(truncation_tol) * max(mpf(1), abs(total)):
        raise SeriesTruncationError(
            f"series of order {series.order} is too short at x2 = {mpmath.nstr(x2, 6)}, delta = {mpmath.nstr(delta, 6)}")
    return total


def scaled_I2(sys: PWSSystem, phi: RegularizationFunction, x2: Number, delta: Number, k: int,
              order: int = 25, method: str = "auto", series: TruncatedSeries | None = None) -> mpf:
    """Rescaled slow divergence integral ``I_2(x2, delta)``.

    The series route is used for ``delta < 1e-2`` (or ``method="series"``);
    quadrature is kept for cross checks at larger ``delta``.
    """
    delta = big(delta)
    x2 = big(x2)
    if method == "series" or (method == "auto" and delta < mpf("1e-2")):
        if series is None:
            series = sdi_series(sys, phi, order)
        return scaled_I2_series(series, x2, delta, k)
    value = sdi_quadrature(sys, phi, delta * x2)
    return value / (delta ** (2 * k + 1) * x2**3)


# roots ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Root:
    """A located zero with its derivative and simplicity verdict."""

    location: mpf
    derivative: mpf
    simple: bool
    multiplicity: int = 1


def _numeric_slope(f, x, scale):
    h = scale * mpf(10) ** (-(mp.dps // 3))
    return (f(x + h) - f(x - h)) / (2 * h)


def find_simple_roots(f: Callable[[mpf], mpf], bracket: tuple, tol: Number | None = None,
                      df: Callable[[mpf], mpf] | None = None, grid_n: int = 400,
                      refine_depth: int = 6, simple_ratio: Number = mpf("1e-10")) -> list[Root]:
    """Zeros of ``f`` in ``bracket`` located by sign changes.

    The scan starts on a uniform grid and subdivides around local minima of
    ``|f|`` that show no sign change, so that close pairs of roots are not
    missed.  Each sign change is bisected and then polished with Newton
    steps.  A root is flagged simple when ``|f'|`` there exceeds
    ``simple_ratio`` times the largest ``|f'|`` seen on the grid.

    Parameters
    ----------
    f : callable
        Function of one ``mpf`` argument.
    bracket : (number, number)
        Search interval.
    tol : number, optional
        Absolute tolerance in the location; defaults to working precision.
    df : callable, optional
        Derivative of ``f``; central differences are used otherwise.
    """
    a, b = big(bracket[0]), big(bracket[1])
    if not a < b:
        raise ConfigError("root bracket must have a < b")
    scale = b - a
    tol = scale * mpf(10) ** (-(mp.dps - 10)) if tol is None else big(tol)
    slope = df if df is not None else (lambda x: _numeric_slope(f, x, scale))
    xs = [a + scale * j / grid_n for j in range(grid_n + 1)]
    vs = [f(x) for x in xs]
    samples = list(zip(xs, vs))

    def refine(lo, hi, depth):
        if depth == 0:
            return []
        pts = [lo + (hi - lo) * j / 8 for j in range(1, 8)]
        vals = [(p, f(p)) for p in pts]
        out = list(vals)
        full = [(lo, f(lo))] + vals + [(hi, f(hi))]
        if any(full[i][1] * full[i + 1][1] <= 0 for i in range(len(full) - 1)):
            return out
        mags = [abs(v) for _, v in full]
        i = min(range(1, len(full) - 1), key=lambda j: mags[j])
        if mags[i] < mags[i - 1] and mags[i] < mags[i + 1]:
            out.extend(refine(full[i - 1][0], full[i + 1][0], depth - 1))
        return out

    extra = []
    for i in range(1, len(samples) - 1):
        v0, v1, v2 = samples[i - 1][1], samples[i][1], samples[i + 1][1]
        if v0 * v1 > 0 and v1 * v2 > 0 and abs(v1) < abs(v0) and abs(v1) < abs(v2):
            extra.extend(refine(samples[i - 1][0], samples[i + 1][0], refine_depth))
    samples = sorted(samples + extra, key=lambda s: s[0])

    roots: list[mpf] = []
    for (x0, v0), (x1, v1) in zip(samples, samples[1:]):
        if v0 == 0:
            if not roots or abs(roots[-1] - x0) > tol:
                roots.append(x0)
            continue
        if v0 * v1 < 0:
            lo, hi, flo = x0, x1, v0
            for _ in range(60):
                mid = (lo + hi) / 2
                fm = f(mid)
                if fm == 0:
                    lo = hi = mid
                    break
                if (fm < 0) == (flo < 0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            r = (lo + hi) / 2
            for _ in range(40):
                d = slope(r)
                if d == 0:
                    break
                step = f(r) / d
                nxt = r - step
                if not x0 <= nxt <= x1:
                    break
                r = nxt
                if abs(step) <= tol:
                    break
            roots.append(r)
    if samples[-1][1] == 0 and (not roots or abs(roots[-1] - samples[-1][0]) > tol):
        roots.append(samples[-1][0])

    grid_slopes = [abs(slope(x)) for x in xs[:: max(1, grid_n // 100)]]
    ref = max(grid_slopes) if grid_slopes else mpf(0)
    out = []
    for r in roots:
        d = slope(r)
        simple = ref > 0 and abs(d) > big(simple_ratio) * ref
        out.append(Root(r, d, bool(simple), 1 if simple else 2))
    return out


# profiles ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SDIProfile:
    """Values of ``I`` on a grid together with its series and roots."""

    grid: tuple
    values: tuple
    series: TruncatedSeries | None
    roots: tuple = ()
    method: str = "series"
    meta: dict = field(default_factory=dict)


def build_profile(sys: PWSSystem, phi: RegularizationFunction, grid: Sequence[Number],
                  order: int = 25, method: str = "series", root_bracket: tuple | None = None) -> SDIProfile:
    """Evaluate ``I`` on ``grid`` and locate its simple roots.

    ``method`` chooses the series route or quadrature for the grid values;
    roots are always searched on the series when it is available.
    """
    grid = [big(x) for x in grid]
    series = sdi_series(sys, phi, order)
    if method == "series":
        values = [series.evaluate(x) for x in grid]
    elif method == "quadrature":
        values = [sdi_quadrature(sys, phi, x) if x != 0 else mpf(0) for x in grid]
    else:
        raise ConfigError(f"unknown method {method!r}")
    roots: list[Root] = []
    if root_bracket is not None:
        dseries = series.derivative()
        roots = find_simple_roots(series.evaluate, root_bracket, df=dseries.evaluate)
    return SDIProfile(tuple(grid), tuple(values), series, tuple(roots), method)

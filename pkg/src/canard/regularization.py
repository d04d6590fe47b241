"""Regularization functions and their derivative towers.

A regularization function is a smooth, strictly increasing sigmoid with
limits 0 and 1.  Three kinds are provided:

``ArctanRegularization``
    The reference sigmoid ``1/2 + arctan(s)/pi``.
``PolynomialJet``
    A polynomial stored by its Taylor coefficients around a center.  It is
    only meaningful near that center and is used as the local replacement of
    the reference function.
``BlendedRegularization``
    A base sigmoid glued to a polynomial jet by a compactly supported bump:
    it equals the jet on ``[c - u, c + u]`` and the base function outside
    ``(c - 2u, c + 2u)``.

:class:`SmoothBump` implements the bump ``B`` built from ``exp(-1/x)`` so
that ``B = 1`` on ``[-1, 1]`` and ``B = 0`` for ``|x| >= sqrt(2)``.  Its
derivatives of any order come from truncated series of the building blocks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import mpmath
from mpmath import mp, mpf

from .errors import ConfigError, NonMonotoneError
from .precision import Number, big, to_decimal
from .series import TruncatedSeries

__all__ = [
    "RegularizationFunction",
    "ArctanRegularization",
    "PolynomialJet",
    "SmoothBump",
    "BlendedRegularization",
    "MonotonicityReport",
    "eval_regfun",
    "invert_regfun",
    "bump_eval",
    "blend",
    "monotonicity_audit",
    "regfun_from_json",
    "load_regfun",
]


class RegularizationFunction:
    """Common interface of all regularization kinds."""

    kind = "abstract"

    def derivatives(self, y: Number, n: int) -> list[mpf]:
        """Values ``f(y), f'(y), ..., f^(n)(y)``."""
        raise NotImplementedError

    def derivative(self, y: Number, n: int = 1) -> mpf:
        return self.derivatives(y, n)[n]

    def value(self, y: Number) -> mpf:
        return self.derivatives(y, 0)[0]

    def __call__(self, y: Number) -> mpf:
        return self.value(y)

    def taylor(self, y: Number, order: int) -> TruncatedSeries:
        """Truncated Taylor series of the function around ``y``."""
        return TruncatedSeries.from_derivatives(self.derivatives(y, order), y, order)

    def inverse(self, p: Number) -> mpf:
        raise NotImplementedError

    def float_evaluator(self) -> Callable[[float], tuple[float, float]]:
        """Double precision ``s -> (f(s), f'(s))`` for fast trajectory work."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _check_probability(p: mpf) -> None:
    if not (0 < p < 1):
        raise ConfigError(f"inverse needs a value strictly between 0 and 1, got {mpmath.nstr(p, 10)}")


class ArctanRegularization(RegularizationFunction):
    """Reference sigmoid ``1/2 + arctan(s)/pi``.

    Derivatives use the recurrence obtained by differentiating
    ``(1 + s**2) r = 1`` for ``r = 1/(1 + s**2)``.
    """

    kind = "reference-arctan"

    def derivatives(self, y: Number, n: int) -> list[mpf]:
        y = big(y)
        out = [mpf(1) / 2 + mpmath.atan(y) / mp.pi]
        if n == 0:
            return out
        q = 1 + y * y
        r = [1 / q]
        for m in range(1, n):
            prev2 = r[m - 2] if m >= 2 else mpf(0)
            r.append(-(2 * m * y * r[m - 1] + m * (m - 1) * prev2) / q)
        out.extend(v / mp.pi for v in r[:n])
        return out

    def inverse(self, p: Number) -> mpf:
        p = big(p)
        _check_probability(p)
        return mpmath.tan(mp.pi * (p - mpf(1) / 2))

    def float_evaluator(self):
        inv_pi = 1.0 / math.pi

        def ev(s: float) -> tuple[float, float]:
            return 0.5 + math.atan(s) * inv_pi, inv_pi / (1.0 + s * s)

        return ev

    def to_json(self) -> dict:
        return {"kind": self.kind}

    def __repr__(self) -> str:
        return "ArctanRegularization()"


@dataclass(frozen=True, eq=False)
class PolynomialJet(RegularizationFunction):
    """Polynomial ``sum(c_j (y - center)**j)`` of degree ``2k``.

    Parameters
    ----------
    center : mpf
        Expansion point.
    coefficients : tuple of mpf
        Taylor coefficients ``c_0, c_1, ..., c_{2k}``.
    k : int
        Half the degree; recorded for bookkeeping.
    """

    center: mpf
    coefficients: tuple
    k: int = 0
    kind = "polynomial-jet"

    def __post_init__(self):
        object.__setattr__(self, "center", big(self.center))
        object.__setattr__(self, "coefficients", tuple(big(c) for c in self.coefficients))
        if not self.k:
            object.__setattr__(self, "k", max(1, (len(self.coefficients) - 1) // 2))

    @classmethod
    def from_derivatives(cls, center: Number, derivatives: Sequence[Number], k: int = 0) -> "PolynomialJet":
        coeffs = [big(d) / mpmath.factorial(j) for j, d in enumerate(derivatives)]
        return cls(center, tuple(coeffs), k)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def jet(self) -> list[mpf]:
        """Derivatives at the center, ``j! c_j``."""
        return [c * mpmath.factorial(j) for j, c in enumerate(self.coefficients)]

    def derivatives(self, y: Number, n: int) -> list[mpf]:
        t = big(y) - self.center
        out = []
        coeffs = list(self.coefficients)
        for _ in range(n + 1):
            acc = mpf(0)
            for c in reversed(coeffs):
                acc = acc * t + c
            out.append(acc)
            coeffs = [coeffs[j] * j for j in range(1, len(coeffs))] or [mpf(0)]
        return out

    def inverse(self, p: Number) -> mpf:
        """Local inverse near the center by Newton iteration."""
        p = big(p)
        c0 = self.coefficients[0]
        c1 = self.coefficients[1] if self.degree >= 1 else mpf(0)
        if c1 == 0:
            raise NonMonotoneError("jet has zero slope at its center")
        y = self.center + (p - c0) / c1
        eps = mpf(10) ** (-(mp.dps - 5))
        for _ in range(200):
            f, df = self.derivatives(y, 1)
            if df <= 0:
                raise NonMonotoneError(f"jet is not increasing at y = {mpmath.nstr(y, 10)}")
            step = (f - p) / df
            y -= step
            if abs(step) <= eps * (1 + abs(y)):
                return y
        raise NonMonotoneError("Newton iteration for the jet inverse did not converge")

    def float_evaluator(self):
        coeffs = [float(c) for c in self.coefficients]
        dcoeffs = [j * coeffs[j] for j in range(1, len(coeffs))]
        c = float(self.center)

        def ev(s: float) -> tuple[float, float]:
            t = s - c
            v = 0.0
            for a in reversed(coeffs):
                v = v * t + a
            d = 0.0
            for a in reversed(dcoeffs):
                d = d * t + a
            return v, d

        return ev

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "center": to_decimal(self.center),
            "coefficients": [to_decimal(c) for c in self.coefficients],
        }


def _b0_series(s0: mpf, sign: int, order: int) -> TruncatedSeries:
    """Series of ``exp(-1/u)`` in ``s`` around ``s0`` where ``u = s`` or ``u = 1 - s``."""
    u0 = s0 if sign > 0 else 1 - s0
    if u0 <= 0 or 1 / u0 > (mp.dps + 10) * mpmath.ln(10):
        return TruncatedSeries([0], s0, order)
    u = TruncatedSeries([u0, sign], s0, order)
    return (-(u.reciprocal())).exp()


def _step_series(s0: mpf, order: int) -> TruncatedSeries:
    """Series of the smooth step ``b(s) / (b(s) + b(1 - s))`` around ``s0``."""
    if s0 <= 0:
        return TruncatedSeries([0], s0, order)
    if s0 >= 1:
        return TruncatedSeries([1], s0, order)
    left = _b0_series(s0, 1, order)
    right = _b0_series(s0, -1, order)
    return left / (left + right)


def _float_step(s: float) -> tuple[float, float]:
    if s <= 0.0:
        return 0.0, 0.0
    if s >= 1.0:
        return 1.0, 0.0
    a = math.exp(-1.0 / s)
    b = math.exp(-1.0 / (1.0 - s))
    da = a / (s * s)
    db = b / ((1.0 - s) * (1.0 - s))
    tot = a + b
    return a / tot, (da * b + a * db) / (tot * tot)


@dataclass(frozen=True)
class SmoothBump:
    """Bump ``B_u(y) = B(y / u)`` with a flat top on ``[-u, u]``.

    ``B(x) = 1 - S(x**2 - 1)`` where ``S`` is the smooth step built from
    ``exp(-1/s)``; hence ``B`` vanishes for ``|x| >= sqrt(2)``.
    """

    upsilon: mpf = mpf("0.05")

    def __post_init__(self):
        u = big(self.upsilon)
        if u <= 0:
            raise ConfigError("bump half width must be positive")
        object.__setattr__(self, "upsilon", u)

    @staticmethod
    def unit_series(x0: Number, order: int) -> TruncatedSeries:
        """Taylor series of the unit bump ``B`` around ``x0``."""
        x0 = big(x0)
        s0 = x0 * x0 - 1
        inner = TruncatedSeries([s0, 2 * x0, 1], x0, order)
        step = _step_series(s0, order)
        return 1 - step.compose(inner)

    def derivatives(self, y: Number, n: int) -> list[mpf]:
        """``B_u(y), B_u'(y), ..., B_u^(n)(y)``."""
        x = big(y) / self.upsilon
        if abs(x) <= 1:
            return [mpf(1)] + [mpf(0)] * n
        if x * x >= 2:
            return [mpf(0)] * (n + 1)
        ser = self.unit_series(x, n)
        return [ser.coeffs[j] * mpmath.factorial(j) / self.upsilon**j for j in range(n + 1)]

    def value(self, y: Number) -> mpf:
        return self.derivatives(y, 0)[0]

    def float_evaluator(self) -> Callable[[float], tuple[float, float]]:
        u = float(self.upsilon)

        def ev(t: float) -> tuple[float, float]:
            x = t / u
            step, dstep = _float_step(x * x - 1.0)
            return 1.0 - step, -dstep * 2.0 * x / u

        return ev


@dataclass(frozen=True, eq=False)
class BlendedRegularization(RegularizationFunction):
    """Base sigmoid replaced by a polynomial jet near the jet's center.

    ``f(y) = base(y) (1 - B_u(y - c)) + jet(y) B_u(y - c)``.
    """

    base: RegularizationFunction
    psi: PolynomialJet
    upsilon: mpf = mpf("0.05")
    kind = "blended"

    def __post_init__(self):
        object.__setattr__(self, "upsilon", big(self.upsilon))
        if self.upsilon <= 0:
            raise ConfigError("blend half width must be positive")
        object.__setattr__(self, "_bump", SmoothBump(self.upsilon))

    @property
    def center(self) -> mpf:
        return self.psi.center

    @property
    def bump(self) -> SmoothBump:
        return self._bump

    def region(self, y: Number) -> str:
        t = abs(big(y) - self.center)
        if t <= self.upsilon:
            return "jet"
        if t * t >= 2 * self.upsilon**2:
            return "base"
        return "transition"

    def derivatives(self, y: Number, n: int) -> list[mpf]:
        y = big(y)
        region = self.region(y)
        if region == "jet":
            return self.psi.derivatives(y, n)
        if region == "base":
            return self.base.derivatives(y, n)
        phi = self.base.derivatives(y, n)
        psi = self.psi.derivatives(y, n)
        bmp = self.bump.derivatives(y - self.center, n)
        out = []
        for m in range(n + 1):
            acc = phi[m]
            for j in range(m + 1):
                acc += mpmath.binomial(m, j) * (psi[j] - phi[j]) * bmp[m - j]
            out.append(acc)
        return out

    def inverse(self, p: Number) -> mpf:
        """Safeguarded Newton iteration inside a monotone bracket."""
        p = big(p)
        _check_probability(p)
        guess = self.base.inverse(p)
        c, u = self.center, self.upsilon
        lo_probe, hi_probe = c - 2 * u, c + 2 * u
        # outside the blend window the base function is used verbatim
        if guess <= lo_probe and self.value(lo_probe) > p:
            return guess
        if guess >= hi_probe and self.value(hi_probe) < p:
            return guess
        lo, hi = lo_probe, hi_probe
        flo, fhi = self.value(lo), self.value(hi)
        if not flo < fhi:
            raise NonMonotoneError("blended function decreases across its blend window")
        if not flo <= p <= fhi:
            return guess
        y = guess if lo < guess < hi else (lo + hi) / 2
        eps = mpf(10) ** (-(mp.dps - 5))
        for _ in range(400):
            f, df = self.derivatives(y, 1)
            if f < p:
                lo = y
            else:
                hi = y
            if df <= 0:
                raise NonMonotoneError(f"derivative is not positive at y = {mpmath.nstr(y, 12)}")
            step = (f - p) / df
            nxt = y - step
            if not lo < nxt < hi:
                nxt = (lo + hi) / 2
            if abs(nxt - y) <= eps * (1 + abs(y)) or hi - lo <= eps * (1 + abs(y)):
                return nxt
            y = nxt
        raise NonMonotoneError("inverse iteration did not converge")

    def float_evaluator(self):
        base = self.base.float_evaluator()
        jet = self.psi.float_evaluator()
        bump = self.bump.float_evaluator()
        c = float(self.center)
        u = float(self.upsilon)

        def ev(s: float) -> tuple[float, float]:
            t = s - c
            if abs(t) <= u:
                return jet(s)
            if t * t >= 2.0 * u * u:
                return base(s)
            f0, f1 = base(s)
            g0, g1 = jet(s)
            b0, b1 = bump(t)
            return f0 + (g0 - f0) * b0, f1 + (g1 - f1) * b0 + (g0 - f0) * b1

        return ev

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "upsilon": to_decimal(self.upsilon),
            "center": to_decimal(self.center),
            "base": self.base.to_json(),
            "psi": self.psi.to_json(),
        }


# functional interface ------------------------------------------------------------------

def eval_regfun(f: RegularizationFunction, y: Number, n: int = 0) -> mpf:
    """``n``-th derivative of ``f`` at ``y`` (``n = 0`` gives the value)."""
    if n < 0:
        raise ValueError("derivative order must be non-negative")
    return f.derivatives(y, n)[n]


def invert_regfun(f: RegularizationFunction, p: Number) -> mpf:
    """The unique ``y`` with ``f(y) = p``."""
    return f.inverse(p)


def bump_eval(b: SmoothBump, y: Number, n: int = 0) -> mpf:
    """Value (``n = 0``) or derivative of the bump ``B_u`` at ``y``."""
    return b.derivatives(y, n)[n]


def blend(phi: RegularizationFunction, psi: PolynomialJet, upsilon: Number) -> BlendedRegularization:
    """Glue ``psi`` into ``phi`` on a window of half width ``upsilon``."""
    return BlendedRegularization(phi, psi, big(upsilon))


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of :func:`monotonicity_audit`.

    ``grid_min`` is the smallest derivative on the grid.  For blended
    functions ``bound_min`` is the smallest value on the blend window of the
    pointwise lower bound ``min(base', jet') - |jet - base| |B_u'|``, which
    follows from writing the derivative as a convex combination of the two
    slopes plus the bump term.  The audit is numerical, not a proof.
    """

    passed: bool
    grid_min: mpf
    argmin: mpf
    bound_min: mpf | None = None
    bound_argmin: mpf | None = None
    violating: mpf | None = None
    range: tuple = ()
    grid_n: int = 0
    note: str = ""
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def s(v):
            return None if v is None else mpmath.nstr(v, 30)
        return {
            "passed": self.passed,
            "status": "pass (numerical)" if self.passed else "fail",
            "grid_min": s(self.grid_min),
            "argmin": s(self.argmin),
            "bound_min": s(self.bound_min),
            "bound_argmin": s(self.bound_argmin),
            "violating": s(self.violating),
            "range": [s(v) for v in self.range],
            "grid_n": self.grid_n,
        }


def monotonicity_audit(f: RegularizationFunction, yrange: tuple | None = None,
                       grid_n: int = 2000) -> MonotonicityReport:
    """Check strict monotonicity of ``f`` on a grid.

    Parameters
    ----------
    f : RegularizationFunction
        Function to audit.
    yrange : (number, number), optional
        Interval to sample.  Defaults to ``[-10, 10]`` for plain kinds and to
        three window half widths around the jet center for blended kinds.
    grid_n : int
        Number of grid intervals, at least 1000.
    """
    if grid_n < 1000:
        raise ConfigError("monotonicity audit needs at least 1000 grid intervals")
    if yrange is None:
        if isinstance(f, BlendedRegularization):
            yrange = (f.center - 3 * f.upsilon, f.center + 3 * f.upsilon)
        else:
            yrange = (mpf(-10), mpf(10))
    a, b = big(yrange[0]), big(yrange[1])
    grid = [a + (b - a) * j / grid_n for j in range(grid_n + 1)]
    slopes = [f.derivative(y, 1) for y in grid]
    gmin = min(slopes)
    argmin = grid[slopes.index(gmin)]
    violating = argmin if gmin <= 0 else None
    bound_min = bound_arg = None
    passed = gmin > 0
    if isinstance(f, BlendedRegularization):
        c, u = f.center, f.upsilon
        window = [c - 2 * u + 4 * u * j / grid_n for j in range(grid_n + 1)]
        bounds = []
        for y in window:
            p0, p1 = f.base.derivatives(y, 1)
            q0, q1 = f.psi.derivatives(y, 1)
            b1 = f.bump.derivatives(y - c, 1)[1]
            bounds.append(min(p1, q1) - abs(q0 - p0) * abs(b1))
        bound_min = min(bounds)
        bound_arg = window[bounds.index(bound_min)]
        if bound_min <= 0 and violating is None:
            violating = bound_arg
        passed = passed and bound_min > 0
    return MonotonicityReport(passed, gmin, argmin, bound_min, bound_arg, violating, (a, b), grid_n,
                              "pass (numerical)" if passed else "fail")


# serialization ------------------------------------------------------------------------

def regfun_from_json(data: Mapping[str, Any]) -> RegularizationFunction:
    """Rebuild a regularization function from its JSON description."""
    try:
        kind = data["kind"]
        if kind == "reference-arctan":
            return ArctanRegularization()
        if kind == "polynomial-jet":
            return PolynomialJet(big(data["center"]), tuple(big(c) for c in data["coefficients"]),
                                 int(data.get("k", 0)))
        if kind == "blended":
            psi = regfun_from_json(data["psi"])
            if not isinstance(psi, PolynomialJet):
                raise ConfigError("blended function needs a polynomial jet")
            return BlendedRegularization(regfun_from_json(data["base"]), psi, big(data["upsilon"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed regularization description: {exc}") from exc
    raise ConfigError(f"unknown regularization kind {data.get('kind')!r}")


def load_regfun(spec: str) -> RegularizationFunction:
    """Built-in name ``"arctan"`` or a path to a JSON description."""
    if spec in ("arctan", "reference-arctan"):
        return ArctanRegularization()
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read regularization file {spec}: {exc}") from exc
    if "phi_k" in data and "kind" not in data:
        data = data["phi_k"]
    return regfun_from_json(data)

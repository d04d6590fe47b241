"""Planar piecewise smooth systems with switching line ``y = 0``.

A :class:`PWSSystem` holds two polynomial vector fields: ``zplus`` acts in
``y > 0`` and ``zminus`` in ``y < 0``.  Their coefficients are affine in a
parameter ``lam``, and the organizing value ``lambda0`` is where the origin is
a visible-invisible two-fold.

On the switching line a point is crossing when both fields push the same way
in ``y``, and sliding when they push against each other.  On sliding points
the Filippov convex combination gives the sliding speed ``X_sl`` and the
weight ``p`` used by the regularized dynamics.  At the two-fold both
quantities are extended by the ratio of ``x`` derivatives.

The module also audits the standing hypotheses used downstream:

* ``sliding_structure``: stable sliding on ``[mu_minus, 0)``, unstable sliding
  on ``(0, mu_plus]``, verified with exact Sturm sequences;
* ``sliding_speed``: ``X_sl > 0`` on the whole domain;
* ``return_range``: the ``zminus`` arc from ``(x, 0)`` lands in ``[mu_minus, 0)``;
* ``reflection_symmetry``: ``zminus`` is reversible under ``x -> -x``;
* ``quadratic_fold``: the upper fold is quadratic;
* ``versality``: the parameter unfolds the two-fold transversally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

import mpmath
from mpmath import mpf

from .errors import BeyondQuadraticTangencyError, ConfigError, NotSlidingError
from .polynomial import (
    AffinePolynomial,
    count_real_roots,
    isolate_real_roots,
    poly_derivative,
    poly_eval,
    poly_trim,
)
from .precision import Number, big, tiny
from .series import TruncatedSeries

__all__ = [
    "PlanarVectorField",
    "PWSSystem",
    "SigmaClassification",
    "AuditItem",
    "AssumptionReport",
    "SlidingFunctions",
    "reference_system",
    "lie_tangency_data",
    "classify_sigma_point",
    "filippov_field",
    "audit_assumptions",
    "transversality_constants",
    "load_system",
]

AUDIT_MARGIN = mpf("1e-20")


def _exact(value):
    """Keep exact inputs exact; everything else becomes an ``mpf``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            return big(value)
    return big(value)


def _harmonize(*values):
    """Make all values exact fractions, or all ``mpf`` if any is inexact."""
    vals = [_exact(v) for v in values]
    if all(isinstance(v, Fraction) for v in vals):
        return vals
    return [big(v) for v in vals]


def _poly_mul(a: list, b: list) -> list:
    out = [a[0] * 0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    return out


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    zero = (a or b)[0] * 0
    return [(a[i] if i < len(a) else zero) - (b[i] if i < len(b) else zero) for i in range(n)]


@dataclass(frozen=True)
class PlanarVectorField:
    """Polynomial vector field ``(X, Y)`` with coefficients affine in ``lam``."""

    X: AffinePolynomial
    Y: AffinePolynomial

    def __call__(self, x: Number, y: Number, lam: Number) -> tuple[mpf, mpf]:
        return self.X.evaluate(x, y, lam), self.Y.evaluate(x, y, lam)

    def lam_derivative(self) -> "PlanarVectorField":
        return PlanarVectorField(self.X.lam_derivative(), self.Y.lam_derivative())

    def on_sigma(self, lam) -> tuple[list, list]:
        """Coefficient lists of ``X(x, 0, lam)`` and ``Y(x, 0, lam)``."""
        return self.X.restrict_y0(lam), self.Y.restrict_y0(lam)

    def is_linear(self) -> bool:
        return self.X.is_linear() and self.Y.is_linear()

    def to_json(self) -> dict:
        return {"X": self.X.to_json(), "Y": self.Y.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "PlanarVectorField":
        try:
            return cls(AffinePolynomial.from_json(data["X"]), AffinePolynomial.from_json(data["Y"]))
        except KeyError as exc:
            raise ConfigError(f"vector field needs both components, missing {exc}") from exc


@dataclass(frozen=True)
class PWSSystem:
    """Pair of polynomial fields glued along ``y = 0``.

    Parameters
    ----------
    zplus, zminus : PlanarVectorField
        Fields acting above and below the switching line.
    lambda0 : Fraction
        Parameter value at which the origin is the two-fold.
    domain : tuple of Fraction
        Interval ``(mu_minus, mu_plus)`` on the switching line with
        ``mu_minus < 0 < mu_plus``.
    name : str
        Free form label stored in output files.
    """

    zplus: PlanarVectorField
    zminus: PlanarVectorField
    lambda0: Fraction = Fraction(0)
    domain: tuple = (Fraction(-1), Fraction(1))
    name: str = "custom"

    def __post_init__(self):
        lam0 = Fraction(self.lambda0) if not isinstance(self.lambda0, Fraction) else self.lambda0
        lo, hi = (Fraction(v) if not isinstance(v, Fraction) else v for v in self.domain)
        if not lo < 0 < hi:
            raise ConfigError("domain must satisfy mu_minus < 0 < mu_plus")
        object.__setattr__(self, "lambda0", lam0)
        object.__setattr__(self, "domain", (lo, hi))

    # evaluation --------------------------------------------------------------
    def fields_at(self, x: Number, y: Number, lam: Number | None = None):
        lam = self.lambda0 if lam is None else lam
        return self.zplus(x, y, lam), self.zminus(x, y, lam)

    def sigma_polynomials(self, lam=None) -> dict[str, list]:
        """Restrictions of all components to the switching line.

        With ``lam`` exact (the default ``lambda0`` is) the coefficients are
        fractions; otherwise ``mpf``.
        """
        lam = self.lambda0 if lam is None else _exact(lam)
        xp, yp = self.zplus.on_sigma(lam)
        xm, ym = self.zminus.on_sigma(lam)
        return {"Xp": xp, "Yp": yp, "Xm": xm, "Ym": ym}

    def sliding_functions(self, lam=None) -> "SlidingFunctions":
        return SlidingFunctions.build(self, lam)

    # serialization -----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "name": self.name,
            "lambda0": str(self.lambda0),
            "domain": [str(self.domain[0]), str(self.domain[1])],
            "zplus": self.zplus.to_json(),
            "zminus": self.zminus.to_json(),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PWSSystem":
        try:
            return cls(
                zplus=PlanarVectorField.from_json(data["zplus"]),
                zminus=PlanarVectorField.from_json(data["zminus"]),
                lambda0=Fraction(str(data.get("lambda0", "0"))),
                domain=tuple(Fraction(str(v)) for v in data.get("domain", ["-1", "1"])),
                name=str(data.get("name", "custom")),
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"malformed system description: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def load_system(path) -> PWSSystem:
    """Read a system description from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read system file {path}: {exc}") from exc
    return PWSSystem.from_json(data)


def reference_system(beta: Number = 2, chi: Number = 1, xi: Number = 1,
                 domain=(Fraction(-1), Fraction(1))) -> PWSSystem:
    """Quadratic upper field and linear lower field forming a two-fold.

    ``zplus = (1, x + xi x**2 / 2)`` and ``zminus = (-chi, -beta (x - lam))``.
    With ``beta > chi > 0`` and ``xi != 0`` every audited hypothesis holds.
    """
    beta, chi, xi = Fraction(str(beta)), Fraction(str(chi)), Fraction(str(xi))
    zplus = PlanarVectorField(
        AffinePolynomial({(0, 0): 1}),
        AffinePolynomial({(1, 0): 1, (2, 0): xi / 2}),
    )
    zminus = PlanarVectorField(
        AffinePolynomial({(0, 0): -chi}),
        AffinePolynomial({(1, 0): -beta, (0, 0): (0, beta)}),
    )
    return PWSSystem(zplus, zminus, Fraction(0), tuple(domain),
                     name=f"quadratic-linear two-fold beta={beta} chi={chi} xi={xi}")


# Lie derivative data and classification ----------------------------------------

def lie_tangency_data(vf: PlanarVectorField, x: Number, lam: Number) -> tuple:
    """First and second Lie derivatives of ``h(x, y) = y`` at ``(x, 0)``.

    Returns
    -------
    tuple
        ``(Y, X * dY/dx + Y * dY/dy, field_nonzero)``, all at ``(x, 0, lam)``.
    """
    x, lam = _harmonize(x, lam)
    exact = isinstance(x, Fraction)

    def ev(poly: AffinePolynomial):
        if exact:
            return sum((c * x**i for i, j, c in poly.exact_terms(lam) if j == 0), Fraction(0))
        return poly.evaluate(x, 0, lam)

    X, Y = ev(vf.X), ev(vf.Y)
    Yx, Yy = ev(vf.Y.partial("x")), ev(vf.Y.partial("y"))
    second = X * Yx + Y * Yy
    return Y, second, (X != 0 or Y != 0)


@dataclass(frozen=True)
class SigmaClassification:
    """Type of a point ``(x, 0)`` on the switching line.

    ``kind`` is ``"crossing"``, ``"stable-sliding"``, ``"unstable-sliding"``
    or ``"tangency"``.  For tangencies ``tangency`` records which side is
    tangent, the visibility of each fold, the two-fold type and whether the
    origin-type conditions of a visible-invisible two-fold with positive
    sliding speed all hold.
    """

    kind: str
    x: Any
    lam: Any
    y_plus: Any
    y_minus: Any
    tangency: dict | None = None

    def summary(self) -> str:
        if self.kind != "tangency":
            return f"{self.kind} (Y+ = {mpmath.nstr(big(self.y_plus), 10)}, Y- = {mpmath.nstr(big(self.y_minus), 10)})"
        t = self.tangency
        if t["side"] == "both":
            status = "pass" if t["vi3"] else "fail"
            return f"tangency, two-fold {t['two_fold_type']}, VI3 conditions: {status}"
        return f"tangency ({t['side']} fold, {t['visibility'][t['side']]})"


def _is_zero(v) -> bool:
    if isinstance(v, Fraction):
        return v == 0
    return abs(v) <= tiny()


def _vi3_conditions(sys: PWSSystem, x, lam) -> dict[str, bool]:
    sp = sys.sigma_polynomials(lam)
    xp0 = poly_eval(sp["Xp"], x)
    xm0 = poly_eval(sp["Xm"], x)
    dyp = poly_eval(poly_derivative(sp["Yp"]), x)
    dym = poly_eval(poly_derivative(sp["Ym"]), x)
    return {
        "upper field points right": xp0 > 0,
        "upper fold opens upward": dyp > 0,
        "lower field points left": xm0 < 0,
        "lower fold opens downward": dym < 0,
        "positive sliding speed": (xm0 * dyp - xp0 * dym) > 0,
    }


def classify_sigma_point(sys: PWSSystem, x: Number, lam: Number | None = None) -> SigmaClassification:
    """Classify ``(x, 0)`` from the signs of the normal components.

    Raises
    ------
    BeyondQuadraticTangencyError
        When a tangent field also has vanishing second Lie derivative.
    """
    lam = sys.lambda0 if lam is None else lam
    x, lam, lo, hi = _harmonize(x, lam, *sys.domain)
    if not (lo <= x <= hi):
        raise ConfigError(f"x = {x} lies outside the domain [{lo}, {hi}]")
    yp, sp2, _ = lie_tangency_data(sys.zplus, x, lam)
    ym, sm2, _ = lie_tangency_data(sys.zminus, x, lam)
    tp, tm = _is_zero(yp), _is_zero(ym)
    if not tp and not tm:
        if (yp > 0) == (ym > 0):
            kind = "crossing"
        elif yp < 0 < ym:
            kind = "stable-sliding"
        else:
            kind = "unstable-sliding"
        return SigmaClassification(kind, x, lam, yp, ym)
    visibility = {}
    if tp:
        if _is_zero(sp2):
            raise BeyondQuadraticTangencyError(f"upper field has a degenerate tangency at x = {x}")
        visibility["above"] = "visible" if sp2 > 0 else "invisible"
    if tm:
        if _is_zero(sm2):
            raise BeyondQuadraticTangencyError(f"lower field has a degenerate tangency at x = {x}")
        visibility["below"] = "visible" if sm2 < 0 else "invisible"
    detail: dict[str, Any] = {"visibility": visibility}
    if tp and tm:
        detail["side"] = "both"
        n_visible = sum(1 for v in visibility.values() if v == "visible")
        detail["two_fold_type"] = {2: "VV", 1: "VI", 0: "II"}[n_visible]
        conditions = _vi3_conditions(sys, x, lam)
        detail["vi3_conditions"] = conditions
        detail["vi3"] = bool(detail["two_fold_type"] == "VI" and visibility["above"] == "visible"
                             and all(conditions.values()))
    else:
        detail["side"] = "above" if tp else "below"
    return SigmaClassification("tangency", x, lam, yp, ym, detail)


# Filippov sliding data ------------------------------------------------------------

@dataclass(frozen=True)
class SlidingFunctions:
    """Rational functions of ``x`` along the switching line at fixed ``lam``.

    ``det`` is ``X- Y+ - X+ Y-``, ``den`` is ``Y+ - Y-`` and ``num`` is
    ``-Y-``.  When all three vanish at the origin (the two-fold case) the
    ``*_reduced`` lists hold the same polynomials divided by ``x``; evaluating
    those avoids the removable singularity entirely.
    """

    det: list
    den: list
    num: list
    reduced: bool
    det_r: list
    den_r: list
    num_r: list
    lam: Any

    @classmethod
    def build(cls, sys: PWSSystem, lam=None) -> "SlidingFunctions":
        sp = sys.sigma_polynomials(lam)
        det = poly_trim(_poly_sub(_poly_mul(sp["Xm"], sp["Yp"]), _poly_mul(sp["Xp"], sp["Ym"])))
        den = poly_trim(_poly_sub(sp["Yp"], sp["Ym"]))
        num = poly_trim([-c for c in sp["Ym"]])
        reduced = all(len(p) > 1 and p[0] == 0 for p in (det, den, num))
        if reduced:
            det_r, den_r, num_r = det[1:], den[1:], num[1:]
        else:
            det_r, den_r, num_r = det, den, num
        lam = sys.lambda0 if lam is None else lam
        return cls(det, den, num, reduced, det_r, den_r, num_r, lam)

    def _mp(self, coeffs):
        return [big(c) for c in coeffs]

    def weight(self, x: Number) -> mpf:
        """Convex weight ``p = -Y- / (Y+ - Y-)``."""
        x = big(x)
        return poly_eval(self._mp(self.num_r), x) / poly_eval(self._mp(self.den_r), x)

    def sliding_speed(self, x: Number) -> mpf:
        x = big(x)
        return poly_eval(self._mp(self.det_r), x) / poly_eval(self._mp(self.den_r), x)

    def divergence_weight(self, x: Number) -> mpf:
        """``(Y+ - Y-)**2 / det`` which multiplies the slow divergence."""
        x = big(x)
        d = poly_eval(self._mp(self.den_r), x)
        factor = x if self.reduced else mpf(1)
        return factor * d * d / poly_eval(self._mp(self.det_r), x)

    def weight_series(self, order: int) -> TruncatedSeries:
        num = TruncatedSeries(self._mp(self.num_r), 0, order)
        den = TruncatedSeries(self._mp(self.den_r), 0, order)
        return num / den

    def divergence_weight_series(self, order: int) -> TruncatedSeries:
        den = TruncatedSeries(self._mp(self.den_r), 0, order)
        det = TruncatedSeries(self._mp(self.det_r), 0, order)
        base = den * den / det
        if self.reduced:
            return TruncatedSeries([0] + list(base.coeffs), 0, order)
        return base


def filippov_field(sys: PWSSystem, x: Number, lam: Number | None = None) -> tuple[mpf, mpf]:
    """Sliding speed ``X_sl`` and convex weight ``p`` at ``(x, 0)``.

    At the two-fold both are the limits obtained from ``x`` derivatives.

    Raises
    ------
    NotSlidingError
        At crossing points or where ``Y+ - Y-`` vanishes without the two-fold
        structure.
    """
    cls_ = classify_sigma_point(sys, x, lam)
    sf = sys.sliding_functions(cls_.lam)
    if cls_.kind == "crossing":
        raise NotSlidingError(f"x = {x} is a crossing point")
    if cls_.kind == "tangency":
        twofold = cls_.tangency.get("side") == "both"
        if not twofold:
            raise NotSlidingError(f"x = {x} is a single fold, not sliding")
        xx, ll = _harmonize(x, sys.lambda0 if lam is None else lam)
        sp = sys.sigma_polynomials(ll)
        dyp = poly_eval(poly_derivative(sp["Yp"]), xx)
        dym = poly_eval(poly_derivative(sp["Ym"]), xx)
        jump = dyp - dym
        if jump == 0:
            raise NotSlidingError("two-fold with equal fold slopes has no sliding limit")
        ddet = poly_eval(poly_derivative(sf.det), xx) if isinstance(xx, Fraction) else \
            poly_eval([big(c) for c in poly_derivative(sf.det)], xx)
        return big(ddet) / big(jump), big(-dym) / big(jump)
    return sf.sliding_speed(x), sf.weight(x)


# assumption audit -------------------------------------------------------------------

@dataclass(frozen=True)
class AuditItem:
    """One audited hypothesis: ``status`` is pass, fail or inconclusive."""

    name: str
    status: str
    value: Any = None
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass(frozen=True)
class AssumptionReport:
    items: tuple

    def __getitem__(self, name: str) -> AuditItem:
        for item in self.items:
            if item.name == name:
                return item
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    @property
    def failed(self) -> list[AuditItem]:
        return [item for item in self.items if item.status == "fail"]

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, (Fraction, mpf)):
                return str(v) if isinstance(v, Fraction) else mpmath.nstr(v, 30)
            if isinstance(v, dict):
                return {str(k): enc(w) for k, w in v.items()}
            if isinstance(v, (list, tuple)):
                return [enc(w) for w in v]
            return v
        return {item.name: {"status": item.status, "value": enc(item.value), "detail": enc(item.detail)}
                for item in self.items}


def _strict_status(value, positive: bool = True) -> str:
    v = big(value)
    if abs(v) <= AUDIT_MARGIN:
        return "inconclusive"
    return "pass" if (v > 0) == positive else "fail"


def _audit_two_fold(sys: PWSSystem) -> AuditItem:
    try:
        c = classify_sigma_point(sys, Fraction(0), sys.lambda0)
    except BeyondQuadraticTangencyError as exc:
        return AuditItem("visible_invisible_two_fold", "fail", None, {"error": str(exc)})
    ok = c.kind == "tangency" and c.tangency.get("side") == "both" and c.tangency.get("vi3")
    detail = {"kind": c.kind}
    if c.tangency:
        detail.update({k: v for k, v in c.tangency.items()})
    return AuditItem("visible_invisible_two_fold", "pass" if ok else "fail", c.summary(), detail)


def _audit_sliding_structure(sys: PWSSystem) -> AuditItem:
    lo, hi = sys.domain
    sp = sys.sigma_polynomials()
    detail: dict[str, Any] = {}
    ok = True
    for key in ("Yp", "Ym"):
        poly = poly_trim(sp[key])
        if len(poly) == 1:
            detail[key] = "identically constant"
            ok = False
            continue
        intervals = isolate_real_roots(poly, lo - Fraction(1, 10**9), hi, width=Fraction(1, 10**12))
        roots = [(a, b) for a, b in intervals]
        has_zero = any(a < 0 <= b for a, b in roots)
        simple = poly_eval(poly_derivative(poly), Fraction(0)) != 0
        detail[key] = {"roots_in_domain": len(roots), "root_at_origin": has_zero and poly_eval(poly, Fraction(0)) == 0,
                       "simple_at_origin": simple}
        if len(roots) != 1 or poly_eval(poly, Fraction(0)) != 0 or not simple:
            ok = False
    if ok:
        left = [poly_eval(sp["Yp"], lo), poly_eval(sp["Ym"], lo)]
        right = [poly_eval(sp["Yp"], hi), poly_eval(sp["Ym"], hi)]
        stable = left[0] < 0 < left[1]
        unstable = right[1] < 0 < right[0]
        detail["stable_sliding_left"] = stable
        detail["unstable_sliding_right"] = unstable
        ok = stable and unstable
    return AuditItem("sliding_structure", "pass" if ok else "fail", ok, detail)


def _audit_sliding_speed(sys: PWSSystem) -> AuditItem:
    lo, hi = sys.domain
    sf = sys.sliding_functions()
    detail: dict[str, Any] = {}
    for key, poly in (("det", sf.det_r), ("den", sf.den_r)):
        p = poly_trim(poly)
        if len(p) > 1:
            detail[f"{key}_roots"] = count_real_roots(p, lo - Fraction(1, 10**9), hi)
        else:
            detail[f"{key}_roots"] = 0 if p[0] != 0 else -1
    grid = [lo + (hi - lo) * Fraction(i, 400) for i in range(401)]
    values = [sf.sliding_speed(x) for x in grid]
    vmin = min(values)
    detail["argmin"] = grid[values.index(vmin)]
    status = _strict_status(vmin)
    if detail["det_roots"] != 0 or detail["den_roots"] != 0:
        status = "fail"
    return AuditItem("sliding_speed", status, vmin, detail)


def _audit_return_range(sys: PWSSystem) -> AuditItem:
    from .sdi import xi_map

    lo, hi = sys.domain
    grid = [hi * Fraction(i, 40) for i in range(1, 41)]
    worst = None
    try:
        for x in grid:
            xi = xi_map(sys, big(x), "forward")
            margin = min(xi - big(lo), -xi)
            if worst is None or margin < worst[0]:
                worst = (margin, x, xi)
    except Exception as exc:  # the report carries the failure
        return AuditItem("return_range", "fail", None, {"error": str(exc)})
    status = "pass" if worst[0] >= 0 and -worst[2] > AUDIT_MARGIN else "fail"
    return AuditItem("return_range", status, worst[0], {"x": worst[1], "xi": worst[2]})


def _audit_symmetry(sys: PWSSystem) -> AuditItem:
    lam = sys.lambda0
    residual = Fraction(0)
    for i, j, c in sys.zminus.X.exact_terms(lam):
        if i % 2 == 1:
            residual = max(residual, abs(c))
    for i, j, c in sys.zminus.Y.exact_terms(lam):
        if i % 2 == 0:
            residual = max(residual, abs(c))
    return AuditItem("reflection_symmetry", "pass" if residual == 0 else "fail", residual,
                     {"rule": "X- even and Y- odd in x"})


def _audit_quadratic_fold(sys: PWSSystem) -> AuditItem:
    sp = sys.sigma_polynomials()
    second = poly_eval(poly_derivative(poly_derivative(sp["Yp"])), Fraction(0))
    return AuditItem("quadratic_fold", "pass" if second != 0 else "fail", second,
                     {"quantity": "second x derivative of Y+ at the origin"})


def _versality_value(sys: PWSSystem):
    sp = sys.sigma_polynomials()
    dyp = poly_eval(poly_derivative(sp["Yp"]), Fraction(0))
    dym = poly_eval(poly_derivative(sp["Ym"]), Fraction(0))
    typ = poly_eval(sys.zplus.Y.lam_derivative().restrict_y0(sys.lambda0), Fraction(0))
    tym = poly_eval(sys.zminus.Y.lam_derivative().restrict_y0(sys.lambda0), Fraction(0))
    return tym * dyp - typ * dym


def _audit_versality(sys: PWSSystem) -> AuditItem:
    value = _versality_value(sys)
    return AuditItem("versality", "pass" if value != 0 else "fail", value,
                     {"quantity": "parameter derivative cross term at the origin"})


def audit_assumptions(sys: PWSSystem) -> AssumptionReport:
    """Evaluate every standing hypothesis and return a report.

    Exact checks use rational arithmetic.  Numerical checks pass only when
    the relevant quantity is bounded away from zero by ``1e-20``; closer
    values are reported as inconclusive.
    """
    items = [
        _audit_two_fold(sys),
        _audit_sliding_structure(sys),
        _audit_sliding_speed(sys),
        _audit_return_range(sys),
        _audit_symmetry(sys),
        _audit_quadratic_fold(sys),
        _audit_versality(sys),
    ]
    return AssumptionReport(tuple(items))


def transversality_constants(sys: PWSSystem, phi) -> tuple[mpf, mpf]:
    """Constants of the linearized passage near the two-fold.

    Returns
    -------
    (mpf, mpf)
        ``A = (Y+' - Y-') phi'(y2c) / X_sl(0)`` and
        ``B = versality / (X_sl(0) (Y+' - Y-'))``.
    """
    sp = sys.sigma_polynomials()
    dyp = big(poly_eval(poly_derivative(sp["Yp"]), Fraction(0)))
    dym = big(poly_eval(poly_derivative(sp["Ym"]), Fraction(0)))
    speed, weight = filippov_field(sys, Fraction(0))
    y2c = phi.inverse(weight)
    slope = phi.derivative(y2c, 1)
    a_const = (dyp - dym) / speed * slope
    b_const = big(_versality_value(sys)) / (speed * (dyp - dym))
    return a_const, b_const

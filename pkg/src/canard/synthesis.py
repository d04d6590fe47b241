"""Construction of regularization functions with prescribed root counts.

Given ``k >= 2`` and a small ``delta > 0`` the aim is a regularization
function whose slow divergence integral has ``k - 1`` simple positive roots
near ``delta * sqrt(i)``.  The recipe:

1. Expand ``prod_{i=1}^{k-1} (x2 - i)``; its coefficients are the targets
   for the odd Taylor coefficients of ``I`` after the rescaling
   ``x = delta * x2``.
2. For each ``i`` the derivative ``I^(2i+1)(0)`` is affine in the even jet
   entry ``phi^(2i)(y2c)``: its slope is ``C_2i / phi'(y2c)**(2i-1)`` with
   ``C_2i`` known in closed form, and its offset ``J_2i-1`` depends only on
   lower derivatives.  ``J`` is read off by running the series pipeline
   with the top entry set to zero.
3. Choosing the even jet entries to cancel ``J`` and add the rescaled target
   coefficient fixes a polynomial jet ``psi`` of degree ``2k``.  Odd entries
   of order at least 3 are zero.
4. ``psi`` is blended into a base sigmoid with a bump of half width
   ``upsilon``; the blend is audited for monotonicity and the roots of the
   rescaled integral are located.

Two conventions for the cancelling values are supported.  In the
``"literal"`` one, ``J`` is evaluated at the lower derivatives of ``psi``
itself, which makes ``I^(2i+1)(0)`` hit its target exactly.  In the
``"unperturbed"`` one, ``J`` is evaluated along the recursion with all
``delta`` terms dropped, and the ``delta`` terms are added afterwards; this
convention reproduces the reference coefficient tables in
:data:`REFERENCE_PSI_COEFFICIENTS`.  The two differ by relative
``O(delta**2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any

import mpmath
from mpmath import mp, mpf

from .errors import ConfigError, SynthesisError
from .polynomial import poly_derivative, poly_eval
from .precision import Number, big, to_decimal
from .pws import PWSSystem, audit_assumptions, filippov_field, reference_system
from .regularization import (
    ArctanRegularization,
    BlendedRegularization,
    MonotonicityReport,
    PolynomialJet,
    RegularizationFunction,
    blend,
    monotonicity_audit,
)
from .sdi import Root, find_simple_roots, sdi_expansion, SDIExpansion

__all__ = [
    "CONVENTIONS",
    "REFERENCE_PSI_COEFFICIENTS",
    "SynthesisSpec",
    "PsiConstruction",
    "SynthesisResult",
    "build_target_polynomial",
    "compute_C2k",
    "compute_J",
    "construct_psi",
    "synthesize",
    "count_simple_roots",
    "tune_delta",
    "TuneResult",
    "golden_check",
]

CONVENTIONS = ("unperturbed", "literal")

#: Reference Taylor coefficients ``c_2, c_4, ..., c_2k`` of ``psi_k`` for the
#: quadratic-linear two-fold with ``beta = 2, chi = xi = 1``, the arctan base
#: function and ``(k, delta) = (4, 1e-3), (6, 1e-4), (8, 1e-5)``.  The first
#: entry of the ``k = 4`` table carries an unreliable sign and is compared by
#: magnitude (see :func:`golden_check`).
REFERENCE_PSI_COEFFICIENTS: dict[int, dict[str, Any]] = {
    4: {"delta": "1e-3", "coefficients": {2: "0.2137243716", 4: "0.306956879", 6: "1.442372260",
                                          8: "-25.33517649"}, "sign_unreliable": (4,)},
    6: {"delta": "1e-4", "coefficients": {2: "0.2137243716", 4: "-0.3069568794", 6: "1.44235445",
                                          8: "-12.12351865", 10: "154.2008391", 12: "-3015.15236"},
        "sign_unreliable": ()},
    8: {"delta": "1e-5", "coefficients": {2: "0.2137243716", 4: "-0.3069568794", 6: "1.442354453",
                                          8: "-12.12351865", 10: "154.2008302", 12: "-2744.019283",
                                          14: "65135.03549", 16: "-1998886.089"},
        "sign_unreliable": ()},
}


@dataclass(frozen=True)
class SynthesisSpec:
    """Inputs of a synthesis run.

    Parameters
    ----------
    k : int
        Number of limit cycles aimed for; ``k - 1`` roots of ``I``.
    delta : number
        Root spacing scale.
    upsilon : number
        Half width of the plateau on which the blend equals the jet.
    base : RegularizationFunction, optional
        Base sigmoid, arctan by default.
    system : PWSSystem, optional
        Defaults to the quadratic-linear two-fold with ``beta = 2``.
    order : int
        Truncation order of the series of ``I``.
    convention : {"unperturbed", "literal"}
        How the cancelling jet values are evaluated (see module docstring).
    """

    k: int
    delta: Any
    upsilon: Any = "0.05"
    base: RegularizationFunction | None = None
    system: PWSSystem | None = None
    order: int = 25
    convention: str = "unperturbed"

    def __post_init__(self):
        if int(self.k) < 2:
            raise ConfigError("k must be at least 2")
        object.__setattr__(self, "k", int(self.k))
        delta, upsilon = big(self.delta), big(self.upsilon)
        if delta <= 0:
            raise ConfigError("delta must be positive")
        if upsilon <= 0:
            raise ConfigError("upsilon must be positive")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "upsilon", upsilon)
        if self.base is None:
            object.__setattr__(self, "base", ArctanRegularization())
        if self.system is None:
            object.__setattr__(self, "system", reference_system())
        if self.convention not in CONVENTIONS:
            raise ConfigError(f"convention must be one of {CONVENTIONS}")
        if self.order < 2 * self.k + 1:
            raise ConfigError(f"series order must be at least 2k + 1 = {2 * self.k + 1}")

    def with_delta(self, delta: Number) -> "SynthesisSpec":
        return replace(self, delta=big(delta))

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "delta": to_decimal(self.delta),
            "upsilon": to_decimal(self.upsilon),
            "order": self.order,
            "convention": self.convention,
            "base": self.base.to_json(),
            "system": self.system.to_json(),
            "precision": mp.dps,
        }


def build_target_polynomial(k: int) -> list[int]:
    """Coefficients of ``prod_{i=1}^{k-1} (x2 - i)``, lowest degree first.

    The list has ``k`` integer entries and ends with 1.
    """
    if k < 2:
        raise ConfigError("k must be at least 2")
    coeffs = [1]
    for r in range(1, k):
        coeffs = [(coeffs[j - 1] if j > 0 else 0) - r * (coeffs[j] if j < len(coeffs) else 0)
                  for j in range(len(coeffs) + 1)]
    return coeffs


def _origin_data(sys: PWSSystem) -> dict[str, Fraction]:
    sp = sys.sigma_polynomials()
    z = Fraction(0)
    d = {
        "dYp": poly_eval(poly_derivative(sp["Yp"]), z),
        "dYm": poly_eval(poly_derivative(sp["Ym"]), z),
        "ddYp": poly_eval(poly_derivative(poly_derivative(sp["Yp"])), z),
    }
    sf = sys.sliding_functions()
    d["ddet"] = poly_eval(poly_derivative(sf.det), z)
    return d


def compute_C2k(sys: PWSSystem, i: int, exact: bool = False):
    """Slope coefficient ``C_2i`` of ``I^(2i+1)(0)`` in the top jet entry.

    ``C_2i = 4 i (Y+' - Y-')**2 / det' * (Y+'' Y-' / (2 (Y+' - Y-')**2))**(2i - 1)``
    evaluated at the origin.  With ``exact=True`` a :class:`Fraction` is
    returned.
    """
    if i < 1:
        raise ConfigError("i must be at least 1")
    d = _origin_data(sys)
    jump = d["dYp"] - d["dYm"]
    if jump == 0 or d["ddet"] == 0:
        raise ConfigError("the origin is not a nondegenerate two-fold")
    ratio = d["ddYp"] * d["dYm"] / (2 * jump * jump)
    value = 4 * i * jump * jump / d["ddet"] * ratio ** (2 * i - 1)
    return value if exact else big(value)


def compute_J(sys: PWSSystem, jet, i: int, y2c: Number) -> mpf:
    """Offset ``J_{2i-1}`` of ``I^(2i+1)(0)``: the value with ``phi^(2i)(y2c) = 0``.

    Parameters
    ----------
    jet : sequence of numbers
        ``phi(y2c), phi'(y2c), ..., phi^(2i-1)(y2c)``; extra entries are
        ignored.
    """
    jet = [big(v) for v in jet]
    if len(jet) < 2 * i:
        raise ConfigError(f"J for i = {i} needs derivatives up to order {2 * i - 1}")
    trial = jet[: 2 * i] + [mpf(0)]
    ex = sdi_expansion(sys, None, 2 * i + 1, jet=trial, y2c=y2c)
    return ex.integral.derivative_at_center(2 * i + 1)


@dataclass(frozen=True)
class PsiConstruction:
    """The jet ``psi`` together with the intermediate quantities."""

    psi: PolynomialJet
    C: tuple
    J: tuple
    Psi0: tuple
    Phi1: tuple
    y2c: mpf
    slope: mpf
    convention: str

    def taylor_coefficients(self) -> list[mpf]:
        return list(self.psi.coefficients)

    def even_derivatives(self) -> list[mpf]:
        jet = self.psi.jet()
        return [jet[2 * i] for i in range(1, self.psi.k + 1)]


def _recursion(sys: PWSSystem, k: int, base_jet: list[mpf], y2c: mpf, C: list[mpf],
               shift: list[mpf]) -> tuple[list[mpf], list[mpf], list[mpf]]:
    """Run the cancelling recursion, adding ``shift[i-1]`` to entry ``2i``."""
    slope = base_jet[1]
    jet = list(base_jet[:2])
    Js, Psi0 = [], []
    for i in range(1, k + 1):
        J = compute_J(sys, jet, i, y2c)
        psi0 = -J * slope ** (2 * i - 1) / C[i - 1]
        Js.append(J)
        Psi0.append(psi0)
        jet.append(psi0 + shift[i - 1])
        jet.append(mpf(0))
    return jet[: 2 * k + 1], Js, Psi0


def construct_psi(spec: SynthesisSpec) -> PsiConstruction:
    """Build the degree ``2k`` jet for the given specification."""
    sys, k, delta = spec.system, spec.k, spec.delta
    _, weight = filippov_field(sys, Fraction(0))
    y2c = spec.base.inverse(weight)
    slope = spec.base.derivative(y2c, 1)
    if slope <= 0:
        raise ConfigError("base function must be increasing at the critical height")
    target = build_target_polynomial(k)
    C = [compute_C2k(sys, i) for i in range(1, k + 1)]
    shift = [mpmath.factorial(2 * i + 1) * delta ** (2 * (k - i)) * slope ** (2 * i - 1) / C[i - 1]
             * target[i - 1] for i in range(1, k + 1)]
    start = [weight, slope]
    if spec.convention == "literal":
        jet, Js, Psi0 = _recursion(sys, k, start, y2c, C, shift)
    else:
        _, Js, Psi0 = _recursion(sys, k, start, y2c, C, [mpf(0)] * k)
        jet = [weight, slope]
        for i in range(1, k + 1):
            jet.append(Psi0[i - 1] + shift[i - 1])
            jet.append(mpf(0))
        jet = jet[: 2 * k + 1]
    psi = PolynomialJet.from_derivatives(y2c, jet, k)
    return PsiConstruction(psi, tuple(C), tuple(Js), tuple(Psi0), tuple(big(t) for t in target),
                           y2c, slope, spec.convention)


@dataclass(frozen=True)
class SynthesisResult:
    """Outcome of :func:`synthesize`.

    ``roots`` are located in the original variable ``x``; ``scaled_roots``
    are the same roots divided by ``delta``.
    """

    spec: SynthesisSpec
    construction: PsiConstruction
    phi_k: BlendedRegularization
    expansion: SDIExpansion
    roots: tuple
    scaled_roots: tuple
    monotonicity: MonotonicityReport | None
    ok: bool
    reason: str = ""
    diagnostics: dict = field(default_factory=dict)

    @property
    def psi(self) -> PolynomialJet:
        return self.construction.psi

    @property
    def n_simple_roots(self) -> int:
        return sum(1 for r in self.roots if r.simple)

    def scaled_value(self, x2: Number) -> mpf:
        """Rescaled integral ``I_2(x2, delta)`` from the stored series."""
        return _scaled(self.expansion.integral, self.spec.delta, self.spec.k)[0](big(x2))

    def derivative_ledger(self) -> list[mpf]:
        """``I^(2i+1)(0) / ((2i+1)! delta**(2(k-i)))`` for ``i = 1..k``."""
        k, delta = self.spec.k, self.spec.delta
        series = self.expansion.integral
        return [series.coeffs[2 * i + 1] / delta ** (2 * (k - i)) for i in range(1, k + 1)]

    def to_json(self) -> dict:
        c = self.construction
        return {
            "spec": self.spec.to_json(),
            "ok": self.ok,
            "reason": self.reason,
            "convention": c.convention,
            "coefficient_basis": "taylor (derivative divided by factorial) in powers of (y2 - y2c)",
            "y2c": to_decimal(c.y2c),
            "psi_coefficients": [to_decimal(v) for v in c.psi.coefficients],
            "psi_derivatives": [to_decimal(v) for v in c.psi.jet()],
            "C": [to_decimal(v) for v in c.C],
            "J": [to_decimal(v) for v in c.J],
            "Psi0": [to_decimal(v) for v in c.Psi0],
            "Phi1": [to_decimal(v) for v in c.Phi1],
            "I_series": [to_decimal(v) for v in self.expansion.integral.coeffs],
            "roots": [{"x": to_decimal(r.location), "x2": to_decimal(r.location / self.spec.delta),
                       "derivative": to_decimal(r.derivative), "simple": r.simple} for r in self.roots],
            "monotonicity": self.monotonicity.to_json() if self.monotonicity else None,
            "phi_k": self.phi_k.to_json(),
            "diagnostics": {key: (to_decimal(v) if isinstance(v, mpf) else v)
                            for key, v in self.diagnostics.items()},
        }


def _scaled(series, delta, k):
    """Polynomial in ``x2`` giving ``I_2`` and its derivative."""
    coeffs = [series.coeffs[2 * j + 1] * delta ** (2 * j - 2 * k) for j in range(1, (series.order - 1) // 2 + 1)]

    def f(x2):
        t = x2 * x2
        acc = mpf(0)
        for c in reversed(coeffs):
            acc = acc * t + c
        return acc

    # d/dx2 of sum c_m x2**(2m) is sum 2 m c_m x2**(2m - 1)
    def df(x2):
        t = x2 * x2
        acc = mpf(0)
        for m in range(len(coeffs) - 1, 0, -1):
            acc = acc * t + 2 * m * coeffs[m]
        return acc * x2

    return f, df, coeffs


def _scaled_roots(expansion: SDIExpansion, k: int, delta: mpf, grid_n: int = 400):
    f, df, coeffs = _scaled(expansion.integral, delta, k)
    top = 2 * mpmath.sqrt(k)
    bracket = (top / 1000, top)
    roots = find_simple_roots(f, bracket, df=df, grid_n=grid_n)
    last = abs(coeffs[-1]) * top ** (2 * len(coeffs) - 2)
    truncation = last / max(mpf(1), max(abs(f(bracket[0] + (top - bracket[0]) * j / 50)) for j in range(51)))
    return roots, truncation


def synthesize(spec: SynthesisSpec, strict: bool = True, check_monotonicity: bool = True,
               check_assumptions: bool = True) -> SynthesisResult:
    """Construct, blend, audit and verify a regularization function.

    Raises
    ------
    SynthesisError
        With ``reason="upsilon too large"`` when the blend is not monotone,
        or ``reason="delta too large"`` when fewer than ``k - 1`` simple roots
        are found.  With ``strict=False`` the result is returned instead with
        ``ok=False``.
    """
    if check_assumptions:
        report = audit_assumptions(spec.system)
        needed = ("visible_invisible_two_fold", "quadratic_fold", "reflection_symmetry")
        bad = [name for name in needed if not report[name].passed]
        if bad:
            raise ConfigError(f"system fails required hypotheses: {', '.join(bad)}")
    construction = construct_psi(spec)
    phi_k = blend(spec.base, construction.psi, spec.upsilon)
    mono = monotonicity_audit(phi_k) if check_monotonicity else None
    expansion = sdi_expansion(spec.system, phi_k, spec.order)
    found, truncation = _scaled_roots(expansion, spec.k, spec.delta)
    dI = expansion.integral.derivative()
    roots = tuple(Root(r.location * spec.delta, dI.evaluate(r.location * spec.delta), r.simple, r.multiplicity)
                  for r in found)
    scaled = tuple(r.location for r in found)
    n_simple = sum(1 for r in found if r.simple)
    ok, reason = True, ""
    if mono is not None and not mono.passed:
        ok, reason = False, "upsilon too large"
    elif n_simple < spec.k - 1:
        ok, reason = False, "delta too large"
    diagnostics = {"simple_roots": n_simple, "series_truncation_ratio": truncation,
                   "expected_scaled_roots": [math.sqrt(i) for i in range(1, spec.k)]}
    result = SynthesisResult(spec, construction, phi_k, expansion, roots, scaled, mono, ok, reason, diagnostics)
    if strict and not ok:
        if reason == "upsilon too large":
            msg = (f"blended function is not monotone (min slope {mpmath.nstr(mono.grid_min, 6)} near "
                   f"y = {mpmath.nstr(mono.violating, 8)}); choose a smaller upsilon")
        else:
            msg = f"only {n_simple} simple roots found, {spec.k - 1} needed; choose a smaller delta"
        raise SynthesisError(msg, reason, result)
    return result


def count_simple_roots(spec: SynthesisSpec) -> int:
    """Number of simple roots of the rescaled integral for ``spec``."""
    res = synthesize(spec, strict=False, check_monotonicity=False, check_assumptions=False)
    return res.n_simple_roots


@dataclass(frozen=True)
class TuneResult:
    """Largest ``delta`` found to give at least ``target`` simple roots."""

    threshold: mpf
    upper: mpf
    target: int
    history: tuple

    def rounded(self, digits: int = 3) -> str:
        return mpmath.nstr(self.threshold, digits)

    def to_json(self) -> dict:
        return {
            "threshold": to_decimal(self.threshold),
            "upper": to_decimal(self.upper),
            "rounded": self.rounded(),
            "target": self.target,
            "history": [{"delta": to_decimal(d), "roots": n} for d, n in self.history],
        }


def tune_delta(spec: SynthesisSpec, target_roots: int, bracket=("1e-5", "1e-3"),
               sig_digits: int = 3) -> TuneResult:
    """Bisect on ``delta`` for the largest value keeping ``target_roots`` roots.

    The search is geometric and stops once the bracket is narrower than a
    tenth of a unit in the ``sig_digits``-th significant digit.

    Raises
    ------
    SynthesisError
        When the root count does not drop below ``target_roots`` inside the
        bracket.
    """
    lo, hi = big(bracket[0]), big(bracket[1])
    if not 0 < lo < hi:
        raise ConfigError("delta bracket must satisfy 0 < lo < hi")
    history = []

    def count(d):
        n = count_simple_roots(spec.with_delta(d))
        history.append((d, n))
        return n

    if count(lo) < target_roots or count(hi) >= target_roots:
        raise SynthesisError("no root count transition inside the delta bracket", "no transition")
    rel = mpf(10) ** (-sig_digits) / 10
    while hi / lo - 1 > rel:
        mid = mpmath.sqrt(lo * hi)
        if count(mid) >= target_roots:
            lo = mid
        else:
            hi = mid
    return TuneResult(lo, hi, target_roots, tuple(history))


def golden_check(result: SynthesisResult, rel_tol: Number = mpf("5e-9")) -> dict | None:
    """Compare the even Taylor coefficients with the reference tables.

    Returns ``None`` when no table exists for ``(k, delta)``; otherwise a
    dictionary with one entry per coefficient and an overall ``passed`` flag.
    Coefficients whose sign is marked unreliable are compared by magnitude
    and their sign agreement is reported separately.
    """
    table = REFERENCE_PSI_COEFFICIENTS.get(result.spec.k)
    if table is None or abs(result.spec.delta / big(table["delta"]) - 1) > mpf("1e-12"):
        return None
    rel_tol = big(rel_tol)
    entries = {}
    passed = True
    for power, printed in table["coefficients"].items():
        ref = big(printed)
        got = result.psi.coefficients[power]
        if power in table["sign_unreliable"]:
            rel = abs(abs(got) - abs(ref)) / abs(ref)
            sign_ok = (got > 0) == (ref > 0)
        else:
            rel = abs(got - ref) / abs(ref)
            sign_ok = True
        ok = rel <= rel_tol
        passed = passed and ok
        entries[power] = {"reference": printed, "computed": mpmath.nstr(got, 15),
                          "relative_error": mpmath.nstr(rel, 3), "ok": ok, "sign_agrees": sign_ok}
    return {"passed": passed, "rel_tol": mpmath.nstr(rel_tol, 3), "coefficients": entries}

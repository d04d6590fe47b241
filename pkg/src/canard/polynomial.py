"""Polynomial vector field components and real root isolation.

Vector fields in this package are polynomial in the phase variables ``x``
and ``y`` with coefficients that are affine in the unfolding parameter
``lam``.  :class:`AffinePolynomial` keeps those coefficients as exact
fractions, so restrictions to the switching line, parameter derivatives and
symmetry checks are exact.

For one variable the module offers plain coefficient lists (lowest degree
first) together with a Sturm sequence root counter.  With
:class:`fractions.Fraction` coefficients the Sturm sequence is exact; with
``mpf`` coefficients it is accurate to working precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath
from mpmath import mpf

from .errors import ConfigError
from .precision import Number, big

__all__ = [
    "AffinePolynomial",
    "poly_eval",
    "poly_derivative",
    "poly_trim",
    "sturm_sequence",
    "count_real_roots",
    "isolate_real_roots",
]


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value)
    raise ConfigError(f"polynomial coefficients must be exact numbers, got {value!r}")


@dataclass(frozen=True)
class AffinePolynomial:
    """Polynomial in ``(x, y)`` with coefficients ``a + b * lam``.

    Parameters
    ----------
    terms : mapping
        Keys are exponent pairs ``(i, j)`` for ``x**i * y**j``; values are
        ``(a, b)`` pairs of exact numbers.

    Examples
    --------
    The second component ``-2 (x - lam)`` of a linear field:

    >>> p = AffinePolynomial({(1, 0): (-2, 0), (0, 0): (0, 2)})
    >>> p.evaluate(1, 0, 0)
    mpf('-2.0')
    """

    terms: Mapping[tuple[int, int], tuple[Fraction, Fraction]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, value in dict(self.terms).items():
            i, j = (int(key[0]), int(key[1]))
            if i < 0 or j < 0:
                raise ConfigError("exponents must be non-negative")
            if isinstance(value, (tuple, list)):
                a, b = _frac(value[0]), _frac(value[1])
            else:
                a, b = _frac(value), Fraction(0)
            if a != 0 or b != 0:
                clean[(i, j)] = (a, b)
        object.__setattr__(self, "terms", clean)

    # structural helpers ------------------------------------------------------
    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.terms), default=0)

    def is_linear(self) -> bool:
        return all(i + j <= 1 for i, j in self.terms)

    def lam_derivative(self) -> "AffinePolynomial":
        """Derivative with respect to the unfolding parameter."""
        return AffinePolynomial({k: (b, 0) for k, (a, b) in self.terms.items()})

    def partial(self, var: str) -> "AffinePolynomial":
        """Partial derivative with respect to ``"x"`` or ``"y"``."""
        out: dict = {}
        for (i, j), (a, b) in self.terms.items():
            if var == "x" and i > 0:
                out[(i - 1, j)] = (a * i, b * i)
            elif var == "y" and j > 0:
                out[(i, j - 1)] = (a * j, b * j)
            elif var not in ("x", "y"):
                raise ValueError("var must be 'x' or 'y'")
        return AffinePolynomial(out)

    def coefficient_at(self, key: tuple[int, int], lam) -> object:
        a, b = self.terms.get(key, (Fraction(0), Fraction(0)))
        return a + b * lam

    def restrict_y0(self, lam) -> list:
        """Coefficients (lowest first) of ``x -> P(x, 0, lam)``.

        ``lam`` may be a :class:`Fraction` for exact output or an ``mpf``.
        """
        deg = max((i for i, j in self.terms if j == 0), default=0)
        coeffs = [lam * 0 for _ in range(deg + 1)]
        for (i, j), (a, b) in self.terms.items():
            if j == 0:
                coeffs[i] = coeffs[i] + a + b * lam
        return coeffs

    def evaluate(self, x: Number, y: Number, lam: Number):
        """Evaluate at a point with ``mpf`` arithmetic."""
        x, y, lam = big(x), big(y), big(lam)
        total = mpf(0)
        for (i, j), (a, b) in self.terms.items():
            c = big(a) + big(b) * lam
            total += c * x**i * y**j
        return total

    def float_terms(self, lam: float) -> list[tuple[int, int, float]]:
        """Monomials with double precision coefficients at fixed ``lam``."""
        return [(i, j, float(a) + float(b) * lam) for (i, j), (a, b) in self.terms.items()]

    def exact_terms(self, lam) -> list[tuple[int, int, object]]:
        """Monomials ``(i, j, coefficient)`` at fixed ``lam``, zeros dropped."""
        out = [(i, j, a + b * lam) for (i, j), (a, b) in self.terms.items()]
        return [t for t in out if t[2] != 0]

    # serialization -----------------------------------------------------------
    def to_json(self) -> list[dict]:
        out = []
        for (i, j), (a, b) in sorted(self.terms.items()):
            out.append({"x": i, "y": j, "coeff": str(a), "lam_coeff": str(b)})
        return out

    @classmethod
    def from_json(cls, data: Iterable[Mapping]) -> "AffinePolynomial":
        terms: dict = {}
        try:
            for item in data:
                key = (int(item["x"]), int(item["y"]))
                a = _frac(item.get("coeff", "0"))
                b = _frac(item.get("lam_coeff", "0"))
                old = terms.get(key, (Fraction(0), Fraction(0)))
                terms[key] = (old[0] + a, old[1] + b)
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"malformed polynomial term list: {exc}") from exc
        return cls(terms)


# univariate helpers ----------------------------------------------------------

def poly_trim(coeffs: Sequence) -> list:
    """Drop vanishing leading coefficients (keeps at least one entry)."""
    out = list(coeffs)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def poly_eval(coeffs: Sequence, x):
    """Horner evaluation of a coefficient list (lowest degree first)."""
    acc = x * 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_derivative(coeffs: Sequence) -> list:
    if len(coeffs) <= 1:
        return [coeffs[0] * 0 if coeffs else 0]
    return [c * i for i, c in enumerate(coeffs)][1:]


def _poly_rem(num: Sequence, den: Sequence) -> list:
    num = poly_trim(list(num))
    den = poly_trim(list(den))
    zero = den[0] * 0
    while len(num) >= len(den) and not (len(num) == 1 and num[0] == 0):
        factor = num[-1] / den[-1]
        shift = len(num) - len(den)
        for i, c in enumerate(den):
            num[shift + i] = num[shift + i] - factor * c
        num.pop()
        if not num:
            return [zero]
        num = poly_trim(num)
    return num


def sturm_sequence(coeffs: Sequence) -> list[list]:
    """Sturm sequence ``p, p', -rem(p, p'), ...`` of a univariate polynomial."""
    p0 = poly_trim(list(coeffs))
    if len(p0) == 1:
        return [p0]
    seq = [p0, poly_trim(poly_derivative(p0))]
    while len(seq[-1]) > 1:
        rem = _poly_rem(seq[-2], seq[-1])
        if all(c == 0 for c in rem):
            break
        seq.append([-c for c in rem])
    return seq


def _sign_changes(values: Sequence) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(coeffs: Sequence, lo, hi, seq: list | None = None) -> int:
    """Number of distinct real roots in the half open interval ``(lo, hi]``."""
    seq = sturm_sequence(coeffs) if seq is None else seq
    return _sign_changes([poly_eval(p, lo) for p in seq]) - _sign_changes([poly_eval(p, hi) for p in seq])


def isolate_real_roots(coeffs: Sequence, lo, hi, width=None, max_depth: int = 400) -> list[tuple]:
    """Disjoint intervals ``(a, b]`` each holding exactly one distinct root.

    Parameters
    ----------
    coeffs : sequence
        Polynomial coefficients, lowest degree first.
    lo, hi : number
        Search interval; roots exactly at ``lo`` are not reported.
    width : number, optional
        Refine each isolating interval until it is narrower than this.
    """
    coeffs = poly_trim(coeffs)
    if len(coeffs) == 1:
        if coeffs[0] == 0:
            raise ValueError("the zero polynomial has no isolated roots")
        return []
    seq = sturm_sequence(coeffs)
    out: list[tuple] = []
    stack = [(lo, hi, 0)]
    while stack:
        a, b, depth = stack.pop()
        n = count_real_roots(coeffs, a, b, seq)
        if n == 0:
            continue
        if n == 1 and (width is None or b - a <= width):
            out.append((a, b))
            continue
        if depth >= max_depth:
            out.append((a, b))
            continue
        m = (a + b) / 2
        stack.append((m, b, depth + 1))
        stack.append((a, m, depth + 1))
    return sorted(out, key=lambda ab: ab[0])


def to_mpf_list(coeffs: Sequence) -> list[mpf]:
    return [big(c) for c in coeffs]


def rational_approximation(value: Number, max_denominator: int = 10**30) -> Fraction:
    """Exact fraction close to an ``mpf`` value, used to lift parameters."""
    v = big(value)
    man, exp = mpmath.frexp(v)
    frac = Fraction(int(mpmath.nint(man * mpf(2) ** 200))) * Fraction(2) ** (int(exp) - 200)
    return frac.limit_denominator(max_denominator) if max_denominator else frac

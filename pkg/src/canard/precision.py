"""Working precision handling on top of :mod:`mpmath`.

All high precision arithmetic in the package uses ``mpmath.mpf`` numbers.
The number of significant decimal digits is a single process wide setting
that every computation reads from ``mpmath.mp``.  The helpers here make it
easy to set that value for a block of code, to parse user input exactly and
to print numbers so that they read back bit for bit.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from fractions import Fraction
from typing import Iterator, Union

import mpmath
from mpmath import libmp, mp, mpf

from .errors import ConfigError

Number = Union[int, float, str, Fraction, mpf]


def _env_precision() -> int:
    raw = os.environ.get("CANARD_PRECISION", "120")
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"CANARD_PRECISION must be an integer, got {raw!r}") from exc
    if value < 15:
        raise ConfigError("CANARD_PRECISION must be at least 15 digits")
    return value


DEFAULT_PRECISION = _env_precision()


@contextmanager
def working_precision(digits: int | None = None) -> Iterator[int]:
    """Run a block at ``digits`` significant decimal digits.

    Parameters
    ----------
    digits : int, optional
        Decimal digits; defaults to :data:`DEFAULT_PRECISION` (120 unless
        the ``CANARD_PRECISION`` environment variable says otherwise).

    Yields
    ------
    int
        The precision that is active inside the block.
    """
    digits = DEFAULT_PRECISION if digits is None else int(digits)
    if digits < 15:
        raise ConfigError("precision must be at least 15 decimal digits")
    with mpmath.workdps(digits):
        yield digits


def set_precision(digits: int | None = None) -> int:
    """Set the global working precision and return it."""
    digits = DEFAULT_PRECISION if digits is None else int(digits)
    if digits < 15:
        raise ConfigError("precision must be at least 15 decimal digits")
    mp.dps = digits
    return digits


def big(value: Number) -> mpf:
    """Convert ``value`` to an ``mpf`` at the current precision.

    Strings may be decimal literals or exact ratios such as ``"-4/27"``.
    Fractions are divided at working precision so that no binary rounding
    from ``float`` sneaks in.
    """
    if isinstance(value, mpf):
        return +value
    if isinstance(value, Fraction):
        return mpf(value.numerator) / value.denominator
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return mpf(num.strip()) / mpf(den.strip())
        try:
            return mpf(text)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"cannot parse number {value!r}") from exc
    if isinstance(value, (int, float)):
        return mpf(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return mpf(int(value.numerator)) / int(value.denominator)
    raise ConfigError(f"unsupported numeric type {type(value).__name__}")


def to_decimal(x: Number, digits: int | None = None) -> str:
    """Format ``x`` as a decimal string.

    With ``digits`` omitted the string carries enough digits to parse back
    to exactly the same binary value at the current precision.
    """
    x = big(x)
    if digits is None:
        digits = libmp.repr_dps(mp.prec)
    return libmp.to_str(x._mpf_, int(digits))


def ulp(x: Number = 1) -> mpf:
    """Unit in the last place of ``x`` at the current binary precision."""
    x = big(x)
    if x == 0:
        return mpf(2) ** (-mp.prec)
    return mpf(2) ** (mpmath.floor(mpmath.log(abs(x), 2)) - mp.prec + 1)


def tiny() -> mpf:
    """Threshold below which a quantity is treated as an exact zero."""
    return mpf(10) ** (-(mp.dps - 10))

"""Exact rational and arbitrary-precision scalar arithmetic.

Rationals are :class:`fractions.Fraction` throughout the package (stdlib,
always canonical: positive denominator, gcd-reduced).  Arbitrary-precision
floats are mpmath ``mpf`` values carried at an explicit decimal-digit
precision; every function that produces one takes the target digits as an
argument rather than relying on the global mpmath context.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf

from .errors import InputError

#: Support interval of the partial-transpose determinant for 4x4 states:
#: -1/16 at a maximally entangled state, 1/256 at the fully mixed state.
DET_PT_INTERVAL = (Fraction(-1, 16), Fraction(1, 256))

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")
_DECIMAL_RE = re.compile(r"^(-?)(\d+)(?:\.(\d*))?(?:[eE]([+-]?\d+))?$")


def pochhammer(a: Fraction | int, n: int) -> Fraction:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1), exactly.

    (a)_0 = 1 by convention (empty product).  Nonpositive and zero ``a``
    are legal; the product simply vanishes once a factor hits zero, which
    is what truncates terminating hypergeometric series.
    """
    if n < 0:
        raise InputError("pochhammer order must be nonnegative")
    a = Fraction(a)
    out = Fraction(1)
    for k in range(n):
        out *= a + k
    return out


def parse_rational(text: str) -> Fraction:
    """Parse a 'p/q' or integer string into an exact Fraction.

    Only the plain forms used by the file formats are accepted (optional
    leading minus, no whitespace, positive denominator).
    """
    m = _RATIONAL_RE.match(text.strip())
    if not m:
        raise InputError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise InputError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    """Render a Fraction in the 'p/q' wire form ('p' when q == 1)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_decimal(text: str) -> tuple[Fraction, int]:
    """Parse a decimal literal into (exact value, significant digits).

    Significant digits are counted from the first nonzero digit onward,
    including trailing zeros ('0.500' carries three).  The exact value of
    the literal is returned; no binary rounding is involved.
    """
    m = _DECIMAL_RE.match(text.strip())
    if not m:
        raise InputError(f"not a decimal literal: {text!r}")
    sign, intpart, fracpart, exp = m.groups()
    fracpart = fracpart or ""
    digits = intpart + fracpart
    value = Fraction(int(digits), 10 ** len(fracpart))
    if exp:
        e = int(exp)
        value *= Fraction(10) ** e
    if sign == "-":
        value = -value
    stripped = digits.lstrip("0")
    sig = len(stripped) if stripped else 1
    return value, sig


def decimal_render(x: Fraction | int, sig_figs: int) -> str:
    """Correctly rounded fixed-point decimal with ``sig_figs`` significant figures.

    Rounding is half-to-even on the exact rational value, so rendering is
    deterministic and re-parsing plus re-rendering is idempotent.
    """
    if sig_figs < 1:
        raise InputError("sig_figs must be >= 1")
    x = Fraction(x)
    if x == 0:
        return "0." + "0" * (sig_figs - 1) if sig_figs > 1 else "0"
    sign = "-" if x < 0 else ""
    ax = abs(x)
    # exponent e with 10^e <= ax < 10^(e+1)
    e = 0
    if ax >= 1:
        while ax >= 10 ** (e + 1):
            e += 1
    else:
        while ax < 10 ** e:   # e goes negative
            e -= 1
    # scale so that we round an integer with sig_figs digits
    scaled = ax * Fraction(10) ** (sig_figs - 1 - e)
    digits = _round_half_even(scaled)
    if digits >= 10 ** sig_figs:    # rounding bumped into the next decade
        digits //= 10
        e += 1
    ds = str(digits)
    point = e + 1   # digits before the decimal point
    if point >= sig_figs:
        return sign + ds + "0" * (point - sig_figs)
    if point > 0:
        return sign + ds[:point] + "." + ds[point:]
    return sign + "0." + "0" * (-point) + ds


def _round_half_even(q: Fraction) -> int:
    floor = q.numerator // q.denominator
    rem = q - floor
    if rem > Fraction(1, 2):
        return floor + 1
    if rem < Fraction(1, 2):
        return floor
    return floor + (floor % 2)


def mpf_from_fraction(q: Fraction, digits: int) -> mpf:
    """Correctly rounded conversion of an exact rational to an mpf at ``digits``."""
    with mp.workdps(max(digits, 3)):
        return mpf(q.numerator) / q.denominator


def fraction_from_mpf(x: mpf) -> Fraction:
    """Exact rational value of a finite mpf (sign * mantissa * 2^exponent)."""
    sign, man, exp, _ = x._mpf_
    if man == 0 and exp != 0:
        raise InputError(f"cannot convert non-finite value {x} to a rational")
    value = Fraction(int(man)) * Fraction(2) ** exp
    return -value if sign else value


@dataclass(frozen=True)
class BoundedValue:
    """A midpoint-radius enclosure of a real number.

    The represented true value lies in [midpoint - radius, midpoint + radius]
    whenever the producing operation's preconditions held.  ``exact`` is set
    when the producer worked in exact rational arithmetic (radius is then the
    rendering error only, or zero for terminating series).
    """

    midpoint: mpf
    radius: mpf
    exact: Fraction | None = None

    def __post_init__(self):
        if self.radius < 0:
            raise InputError("radius must be nonnegative")

    def contains(self, value) -> bool:
        return abs(self.midpoint - value) <= self.radius

    def __str__(self):
        return f"{self.midpoint} +/- {self.radius}"

"""Moment sequences of the partial-transpose determinant and their file format.

A moment file is JSON:

    {"alpha": "1/2",
     "interval": ["-1/16", "1/256"],
     "moments": ["1", "p1/q1", ...],
     "source": "where these came from"}

with every rational as a 'p/q' string (optional leading minus, no
whitespace).  Exact reconstruction refuses decimal moments; float mode
accepts them with a warning recorded on the sequence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path

from .errors import InputError
from .kernel import DET_PT_INTERVAL, format_rational, parse_decimal, parse_rational


@dataclass
class MomentSequence:
    """Raw power moments <x^n> of a distribution supported on [a, b]."""

    alpha: Fraction
    interval: tuple[Fraction, Fraction]
    moments: list[Fraction]
    source: str = ""
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        a, b = self.interval
        if not a < b:
            raise InputError(f"interval must satisfy a < b, got [{a}, {b}]")
        if not self.moments:
            raise InputError("at least the zeroth moment is required")
        if self.moments[0] != 1:
            raise InputError(f"moments[0] must be 1, got {self.moments[0]}")
        bound = max(abs(a), abs(b))
        for n, m in enumerate(self.moments):
            if abs(m) > bound ** n:
                raise InputError(
                    f"moment {n} = {m} violates the support bound max(|a|,|b|)^n = {bound ** n}"
                )

    def __len__(self):
        return len(self.moments)


def load_moment_file(path: str | Path, allow_decimal: bool = False) -> MomentSequence:
    try:
        with open(path) as f:
            raw = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read moment file {path}: {exc}") from exc
    for key in ("alpha", "interval", "moments"):
        if key not in raw:
            raise InputError(f"moment file {path}: missing field {key!r}")
    if not isinstance(raw["interval"], (list, tuple)) or len(raw["interval"]) != 2:
        raise InputError(f"moment file {path}: interval must be a two-element list")
    warnings = []

    def rat(text, where):
        try:
            return parse_rational(str(text))
        except InputError:
            if allow_decimal:
                value, _ = parse_decimal(str(text))
                warnings.append(f"{where}: decimal literal {text!r} accepted in float mode")
                return value
            raise InputError(
                f"moment file {path}: {where}: {text!r} is not an exact rational "
                "(decimal moments are rejected in exact mode)"
            ) from None

    interval = (rat(raw["interval"][0], "interval[0]"), rat(raw["interval"][1], "interval[1]"))
    moments = [rat(m, f"moments[{i}]") for i, m in enumerate(raw["moments"])]
    seq = MomentSequence(
        alpha=rat(raw["alpha"], "alpha"),
        interval=interval,
        moments=moments,
        source=str(raw.get("source", str(path))),
    )
    seq.warnings.extend(warnings)
    return seq


def save_moment_file(seq: MomentSequence, path: str | Path) -> None:
    body = {
        "alpha": format_rational(seq.alpha),
        "interval": [format_rational(seq.interval[0]), format_rational(seq.interval[1])],
        "moments": [format_rational(m) for m in seq.moments],
        "source": seq.source,
    }
    with open(path, "w") as f:
        json.dump(body, f, indent=1)
        f.write("\n")


def shift_moments(seq: MomentSequence) -> list[Fraction]:
    """Moments of u = (2x - a - b)/(b - a), by exact binomial expansion.

    u maps [a, b] onto [-1, 1]; for the determinant interval the map is
    u = (512 x + 15)/17 and u(0) = 15/17.
    """
    a, b = seq.interval
    center = (a + b) / 2
    halfwidth = (b - a) / 2
    mus = []
    for j in range(len(seq.moments)):
        total = Fraction(0)
        for i in range(j + 1):
            total += comb(j, i) * (-center) ** (j - i) * seq.moments[i]
        mus.append(total / halfwidth ** j)
    return mus


# ---------------------------------------------------------------------------
# Synthetic moment sequences used as test fixtures and demo inputs.

def uniform_moments(count: int, interval=DET_PT_INTERVAL, alpha=Fraction(0)) -> MomentSequence:
    """Exact moments of the uniform density on [a, b]."""
    a, b = interval
    moments = [
        (b ** (n + 1) - a ** (n + 1)) / ((n + 1) * (b - a)) for n in range(count)
    ]
    return MomentSequence(alpha=alpha, interval=(a, b), moments=moments, source="uniform")


def polynomial_density_moments(
    coeffs: list[Fraction], count: int, interval=DET_PT_INTERVAL, alpha=Fraction(0)
) -> MomentSequence:
    """Exact moments of a polynomial density (ascending coefficients in x).

    The density is normalized to unit mass on the interval before the
    moments are taken; it must not integrate to zero.
    """
    a, b = interval
    coeffs = [Fraction(c) for c in coeffs]
    mass = _poly_integral(coeffs, a, b)
    if mass == 0:
        raise InputError("density integrates to zero on the interval")
    coeffs = [c / mass for c in coeffs]
    moments = []
    for n in range(count):
        shifted = [Fraction(0)] * n + coeffs    # x^n * density
        moments.append(_poly_integral(shifted, a, b))
    return MomentSequence(alpha=alpha, interval=(a, b), moments=moments, source="polynomial")


def cubic_test_moments(count: int, interval=DET_PT_INTERVAL) -> MomentSequence:
    """Moments of the cubic density proportional to (x - a)^2 (b - x)."""
    a, b = interval
    # (x - a)^2 (b - x), expanded
    sq = [a * a, -2 * a, Fraction(1)]
    cubic = _poly_mul(sq, [b, Fraction(-1)])
    seq = polynomial_density_moments(cubic, count, interval)
    seq.source = "cubic"
    return seq


def point_mass_moments(count: int, at: Fraction = Fraction(0), interval=DET_PT_INTERVAL) -> MomentSequence:
    """Moments of a unit point mass at ``at`` (inside the interval)."""
    at = Fraction(at)
    moments = [at ** n for n in range(count)]
    return MomentSequence(alpha=Fraction(0), interval=interval, moments=moments, source="point-mass")


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        for j, qj in enumerate(q):
            out[i + j] += pi * qj
    return out


def _poly_integral(coeffs, lo, hi):
    total = Fraction(0)
    for i, c in enumerate(coeffs):
        if c:
            total += c * (hi ** (i + 1) - lo ** (i + 1)) / (i + 1)
    return total

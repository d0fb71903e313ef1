"""Probability tables: file format, reference values, checking and fitting.

A probability table file is JSON:

    {"rows": [{"alpha": "1/2", "value": "29/64", "provenance": "..."}, ...]}

Values are exact 'p/q' rationals or decimal literals; alphas must be
distinct and are kept sorted.

The embedded reference table lists the twenty known conjectured rational
values (ten half-integral, ten integral) together with the six-significant-
figure decimals they are conventionally printed with; ``table_check``
re-renders supplied rationals and compares against those printed forms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import InputError
from .kernel import decimal_render, format_rational, parse_decimal, parse_rational

#: (alpha, exact value, printed 6-significant-figure decimal)
REFERENCE_ROWS: tuple[tuple[Fraction, Fraction, str], ...] = (
    (Fraction(1, 2), Fraction(29, 64), "0.453125"),
    (Fraction(1), Fraction(8, 33), "0.242424"),
    (Fraction(3, 2), Fraction(36061, 262144), "0.137562"),
    (Fraction(2), Fraction(26, 323), "0.0804954"),
    (Fraction(5, 2), Fraction(51548569, 1073741824), "0.0480083"),
    (Fraction(3), Fraction(2999, 103385), "0.0290081"),
    (Fraction(7, 2), Fraction(38911229297, 2199023255552), "0.0176948"),
    (Fraction(4), Fraction(44482, 4091349), "0.0108722"),
    (Fraction(9, 2), Fraction(60515043681347, 9007199254740992), "0.00671852"),
    (Fraction(5), Fraction(89514, 21460999), "0.00417101"),
    (Fraction(11, 2), Fraction(71925602948804923, 27670116110564327424), "0.0025994"),
    (Fraction(6), Fraction(179808469, 110638410169), "0.00162519"),
    (Fraction(13, 2), Fraction(3387374833367307236269, 3324546003940230230441984), "0.0010189"),
    (Fraction(7), Fraction(191151001, 298529164591), "0.000640309"),
    (Fraction(15, 2), Fraction(124792688228667229196729, 309485009821345068724781056), "0.000403227"),
    (Fraction(8), Fraction(1331199762, 5232880523393), "0.000254391"),
    (Fraction(17, 2), Fraction(407557367133399293946182513, 2535301200456458802993406410752), "0.000160753"),
    (Fraction(9), Fraction(74195568677, 729345064647247), "0.000101729"),
    (Fraction(19, 2), Fraction(1338799759394288468677657208071, 20769187434139310514121985316880384), "0.0000644609"),
    (Fraction(10), Fraction(730710456538, 17868447453498669), "0.0000408939"),
)


@dataclass
class TableRow:
    alpha: Fraction
    value: Fraction
    provenance: str = ""


@dataclass
class ProbabilityTable:
    rows: list[TableRow]

    def __post_init__(self):
        alphas = [r.alpha for r in self.rows]
        if len(set(alphas)) != len(alphas):
            raise InputError("table alphas must be distinct")
        self.rows.sort(key=lambda r: r.alpha)

    def value_at(self, alpha: Fraction) -> Fraction | None:
        for r in self.rows:
            if r.alpha == alpha:
                return r.value
        return None

    @classmethod
    def from_rows(cls, pairs, provenance: str = "") -> "ProbabilityTable":
        return cls([TableRow(Fraction(a), Fraction(v), provenance) for a, v in pairs])

    @classmethod
    def reference(cls) -> "ProbabilityTable":
        return cls.from_rows([(a, v) for a, v, _ in REFERENCE_ROWS], provenance="reference")

    @classmethod
    def load(cls, path: str | Path) -> "ProbabilityTable":
        try:
            with open(path) as f:
                raw = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read table {path}: {exc}") from exc
        if not isinstance(raw, dict) or "rows" not in raw or not isinstance(raw["rows"], list):
            raise InputError(f"table {path}: expected an object with a 'rows' list")
        rows = []
        for i, row in enumerate(raw["rows"]):
            if not isinstance(row, dict) or "alpha" not in row or "value" not in row:
                raise InputError(f"table {path}: row {i}: needs 'alpha' and 'value'")
            rows.append(TableRow(
                alpha=_parse_number(str(row["alpha"]), path, i, "alpha"),
                value=_parse_number(str(row["value"]), path, i, "value"),
                provenance=str(row.get("provenance", "")),
            ))
        return cls(rows)

    def save(self, path: str | Path) -> None:
        body = {"rows": [
            {"alpha": format_rational(r.alpha), "value": format_rational(r.value),
             "provenance": r.provenance}
            for r in self.rows
        ]}
        with open(path, "w") as f:
            json.dump(body, f, indent=1)
            f.write("\n")


def _parse_number(text: str, path, i, fieldname) -> Fraction:
    try:
        return parse_rational(text)
    except InputError:
        pass
    try:
        return parse_decimal(text)[0]
    except InputError:
        raise InputError(
            f"table {path}: row {i}: field {fieldname!r}: {text!r} is neither "
            "a 'p/q' rational nor a decimal"
        ) from None


def table_check(table: ProbabilityTable) -> list[dict]:
    """Compare each row's 6-significant-figure rendering with the printed form.

    Rows whose alpha is not among the twenty reference rows are reported as
    UNCHECKED rather than failed.
    """
    printed = {alpha: dec for alpha, _, dec in REFERENCE_ROWS}
    report = []
    for row in table.rows:
        rendered = decimal_render(row.value, 6)
        expected = printed.get(row.alpha)
        if expected is None:
            status = "UNCHECKED"
        else:
            status = "MATCH" if _normalize(rendered) == _normalize(expected) else "MISMATCH"
        report.append({
            "alpha": format_rational(row.alpha),
            "value": format_rational(row.value),
            "rendered": rendered,
            "printed": expected,
            "status": status,
        })
    return report


def _normalize(decimal_text: str) -> str:
    """Drop trailing zeros of the fractional part (printed forms do)."""
    if "." in decimal_text:
        return decimal_text.rstrip("0").rstrip(".")
    return decimal_text


@dataclass
class FitLine:
    """Least-squares slope of ln(value) against alpha, through the origin."""

    slope: float
    points: list[tuple[float, float]]       # (alpha, ln value)
    fitted: list[float]
    residuals: list[float]


def fitline(table: ProbabilityTable) -> FitLine:
    """Fit ln(value) = s * alpha by least squares through the origin."""
    points = []
    for row in table.rows:
        if row.value <= 0:
            raise InputError(f"fitline requires positive values; alpha={row.alpha} has {row.value}")
        points.append((float(row.alpha), math.log(row.value)))
    sxx = sum(a * a for a, _ in points)
    sxy = sum(a * y for a, y in points)
    if sxx == 0:
        raise InputError("cannot fit a slope when every alpha is zero")
    slope = sxy / sxx
    fitted = [slope * a for a, _ in points]
    residuals = [y - f for (_, y), f in zip(points, fitted)]
    return FitLine(slope=slope, points=points, fitted=fitted, residuals=residuals)

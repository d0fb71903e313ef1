"""Named high-precision constants.

The table ships as stored decimal strings (>= 200 significant digits each)
rather than being computed at runtime; the provenance field of every entry
records how the string was produced and how it was independently verified
before freezing.  The composite entries (c1 ... c4, c3_sqrt3) are stored in
exactly the algebraic shape that makes the coefficients of the known
closed-form special values rational; radicals are absorbed into the
constant, per entry, and documented in its description.

Note the ``gauss_agm`` entry is agm(1, sqrt(2)) itself.  Gauss's constant
is its *reciprocal*; callers wanting that must invert explicitly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from mpmath import mp, mpf

from .errors import InputError
from .kernel import parse_decimal

_BUILTIN_RESOURCE = "constants.json"

#: Names every usable table must provide (recognition workflows rely on them).
REQUIRED_NAMES = (
    "pi",
    "gauss_agm",
    "gamma_quarter",
    "gamma_third",
    "square_ice",
    "baxter",
    "c1",
    "c2",
    "c3",
    "c3_sqrt3",
    "c4",
)


@dataclass(frozen=True)
class NamedConstant:
    name: str
    decimal: str
    description: str
    provenance: str

    @property
    def stored_digits(self) -> int:
        """Significant digits carried by the stored decimal string."""
        return parse_decimal(self.decimal)[1]

    def to_mpf(self, digits: int) -> mpf:
        """The constant correctly rounded to ``digits`` significant digits."""
        if digits < 1:
            raise InputError("digits must be positive")
        if digits > self.stored_digits - 2:
            raise InputError(
                f"constant {self.name!r} stores {self.stored_digits} digits; "
                f"{digits} requested (2 guard digits required)"
            )
        value, _ = parse_decimal(self.decimal)
        with mp.workdps(digits):
            rounded = mpf(value.numerator) / value.denominator
        return rounded


class ConstantTable:
    """Lookup table of named constants, loaded from a JSON file."""

    def __init__(self, entries: dict[str, NamedConstant]):
        self._entries = dict(entries)

    @classmethod
    def builtin(cls) -> "ConstantTable":
        with resources.files("sepprob.data").joinpath(_BUILTIN_RESOURCE).open() as f:
            return cls._from_mapping(json.load(f))

    @classmethod
    def from_file(cls, path: str | Path) -> "ConstantTable":
        try:
            with open(path) as f:
                raw = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot load constants file {path}: {exc}") from exc
        return cls._from_mapping(raw)

    @classmethod
    def _from_mapping(cls, raw) -> "ConstantTable":
        if not isinstance(raw, dict):
            raise InputError("constants file must be a JSON object")
        entries = {}
        for name, body in raw.items():
            if not isinstance(body, dict) or "decimal" not in body:
                raise InputError(f"constant {name!r}: entry must carry a 'decimal' field")
            dec = body["decimal"]
            parse_decimal(dec)  # validates the literal
            entries[name] = NamedConstant(
                name=name,
                decimal=dec,
                description=body.get("description", ""),
                provenance=body.get("provenance", ""),
            )
        return cls(entries)

    def names(self):
        return sorted(self._entries)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def get(self, name: str) -> NamedConstant:
        try:
            return self._entries[name]
        except KeyError:
            raise InputError(f"unknown constant {name!r}; known: {', '.join(self.names())}") from None

    def lookup(self, name: str, digits: int) -> mpf:
        """The named constant correctly rounded to ``digits`` significant digits."""
        return self.get(name).to_mpf(digits)


_builtin: ConstantTable | None = None


def builtin_table() -> ConstantTable:
    global _builtin
    if _builtin is None:
        _builtin = ConstantTable.builtin()
    return _builtin


def constant_lookup(name: str, digits: int) -> mpf:
    """Convenience lookup against the builtin table."""
    return builtin_table().lookup(name, digits)

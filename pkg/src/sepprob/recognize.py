"""Recovery of exact rationals and a + b*C closed forms from decimals.

Rational recovery walks the continued-fraction convergents of the exact
value of the decimal literal and accepts the first convergent that the
confidence rules allow.  The rules exist to make under-determined inputs
fail loudly rather than guess: '0.33333' must not come back as 1/3 (too
few digits to discriminate against 33333/100000), while a long expansion
of 26/323 must come back as exactly 26/323 even though far larger
denominators fit the truncated digits even better.

Acceptance rules for a convergent p/q against an input with D significant
digits:

* exact match (zero residual): every component may use at most D/2 digits;
* approximate match: additionally D >= 2 * digits(q) + 6 and the residual
  must be below 10^-(D-2).

Affine recognition a + b*C only runs against a caller-nominated constant
and candidate a values; unrestricted constant search invites false
positives and is deliberately out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf

from .constants import ConstantTable, builtin_table
from .errors import InputError
from .kernel import mpf_from_fraction, parse_decimal

_APPROX_EXTRA_DIGITS = 6


@dataclass(frozen=True)
class RecognitionCandidate:
    """A proposed exact form for a decimal input."""

    form: str                     # "rational" or "affine"
    residual: mpf
    confidence: float
    value: Fraction | None = None       # rational form p/q
    a: Fraction | None = None           # affine form a + b * constant
    b: Fraction | None = None
    constant: str | None = None

    def describe(self) -> str:
        if self.form == "rational":
            return f"{self.value.numerator}/{self.value.denominator}"
        return f"{self.a} + ({self.b}) * {self.constant}"

    def to_json_dict(self) -> dict:
        out = {"form": self.form, "residual": mp.nstr(self.residual, 6),
               "confidence": round(self.confidence, 3)}
        if self.form == "rational":
            out["p"] = str(self.value.numerator)
            out["q"] = str(self.value.denominator)
        else:
            out["a"] = f"{self.a.numerator}/{self.a.denominator}"
            out["b"] = f"{self.b.numerator}/{self.b.denominator}"
            out["constant"] = self.constant
        return out


def convergents(value: Fraction):
    """Continued-fraction convergents of an exact rational, in order."""
    num, den = value.numerator, value.denominator
    p_prev, q_prev = 0, 1      # h_{-2}, k_{-2}
    p, q = 1, 0                # h_{-1}, k_{-1}
    while den:
        a, rem = divmod(num, den)
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        num, den = den, rem
        yield Fraction(p, q)


def _digits_of(n: int) -> int:
    return len(str(abs(n)))


def to_rational(x: str, max_den: int, input_digits: int | None = None) -> RecognitionCandidate | None:
    """Best confidently-identifiable rational p/q with q <= max_den, or None.

    ``input_digits`` overrides the significant-digit count parsed from the
    literal (useful when the caller knows trailing digits were dropped).
    """
    if max_den < 1:
        raise InputError("max_den must be >= 1")
    value, sig = parse_decimal(x)
    digits = input_digits if input_digits is not None else sig
    if value == 0:
        return RecognitionCandidate(form="rational", residual=mpf(0),
                                    confidence=float(digits), value=Fraction(0))
    scale_exp = _scale_exponent(value)
    for cand in convergents(value):
        if cand.denominator > max_den:
            break
        residual = abs(value - cand)
        spec_digits = max(_digits_of(cand.numerator), _digits_of(cand.denominator))
        if spec_digits > digits // 2:
            continue
        if residual == 0:
            return _rational_candidate(cand, residual, digits)
        if digits < 2 * _digits_of(cand.denominator) + _APPROX_EXTRA_DIGITS:
            continue
        if residual >= Fraction(10) ** (scale_exp + 1) * Fraction(1, 10 ** (digits - 2)):
            continue
        return _rational_candidate(cand, residual, digits)
    return None


def _scale_exponent(value: Fraction) -> int:
    """floor(log10 |value|), exactly."""
    av = abs(value)
    e = 0
    if av >= 1:
        while av >= 10 ** (e + 1):
            e += 1
    else:
        while av < Fraction(10) ** e:
            e -= 1
    return e


def _rational_candidate(cand: Fraction, residual: Fraction, digits: int) -> RecognitionCandidate:
    spec_len = _digits_of(cand.numerator) + _digits_of(cand.denominator)
    matched = digits if residual == 0 else max(0, -_scale_exponent(residual) - 1)
    return RecognitionCandidate(
        form="rational",
        residual=mpf_from_fraction(residual, 8) if residual else mpf(0),
        confidence=matched / spec_len,
        value=cand,
    )


def recognize_affine(
    x: str,
    constant: str,
    a_candidates: list[Fraction],
    max_den: int,
    table: ConstantTable | None = None,
) -> RecognitionCandidate | None:
    """Recognize x = a + b * C for a nominated constant C and candidate a values.

    For each candidate a, (x - a)/C is rationalized through
    :func:`to_rational`; the first (a, b) that passes verification at the
    input's full precision is returned.
    """
    table = table or builtin_table()
    entry = table.get(constant)   # raises InputError if unknown
    value, sig = parse_decimal(x)
    if sig < 30:
        raise InputError(f"affine recognition needs >= 30 significant digits, got {sig}")
    wp = sig + 20
    if entry.stored_digits < wp:
        wp = entry.stored_digits
    with mp.workdps(wp):
        c = entry.to_mpf(wp - 2)
        xf = mpf_from_fraction(value, wp)
        for a in a_candidates:
            a = Fraction(a)
            y = (xf - mpf_from_fraction(a, wp)) / c
            text = mp.nstr(y, sig, strip_zeros=False)
            cand = to_rational(text, max_den)
            if cand is None:
                continue
            b = cand.value
            proposal = RecognitionCandidate(
                form="affine", residual=cand.residual, confidence=cand.confidence,
                a=a, b=b, constant=constant,
            )
            ok, residual = verify(proposal, x, min(sig + 10, entry.stored_digits - 2), table)
            if ok:
                return RecognitionCandidate(
                    form="affine", residual=residual, confidence=cand.confidence,
                    a=a, b=b, constant=constant,
                )
    return None


def verify(
    candidate: RecognitionCandidate,
    x: str,
    digits: int,
    table: ConstantTable | None = None,
) -> tuple[bool, mpf]:
    """Recompute the candidate at ``digits`` and compare against the input.

    Passes when the candidate reproduces every supplied significant digit:
    |x - candidate| must stay below one unit in the input's last place (or
    in digit ``digits``, whichever is coarser).  Returns (ok, residual).
    """
    value, sig = parse_decimal(x)
    wp = digits + 10
    if candidate.form == "rational":
        with mp.workdps(wp):
            recomputed = mpf_from_fraction(candidate.value, wp)
    elif candidate.form == "affine":
        table = table or builtin_table()
        entry = table.get(candidate.constant)
        if digits > entry.stored_digits - 2:
            raise InputError(
                f"verification at {digits} digits exceeds stored precision of "
                f"{candidate.constant!r} ({entry.stored_digits} digits)"
            )
        with mp.workdps(wp):
            recomputed = (
                mpf_from_fraction(candidate.a, wp)
                + mpf_from_fraction(candidate.b, wp) * entry.to_mpf(digits)
            )
    else:
        raise InputError(f"cannot verify candidate form {candidate.form!r}")
    with mp.workdps(wp):
        residual = abs(mpf_from_fraction(value, wp) - recomputed)
        m = min(digits, sig)
        threshold = mpf(10) ** (_scale_exponent(value) + 1 - m) if value else mpf(10) ** (-m)
        return bool(residual < threshold), +residual

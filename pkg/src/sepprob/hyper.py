"""Generalized hypergeometric series pFq with certified truncation error.

Series are summed term by term; convergence is certified by a geometric
tail bound.  Once the index n clears every parameter (all a_i + n and
b_j + n positive), each later term ratio

    t_{m+1}/t_m = z * prod(a_i + m) / (prod(b_j + m) * (m + 1))

is bounded above, for all m >= n, by pairing the sorted upper parameters
against the sorted lower parameters (including the implicit (m+1) from the
factorial): a pair with a <= b contributes at most 1 for every m, and a
pair with a > b is decreasing in m, so its value at m = n bounds the rest.
The tail after term n is then at most |t_n| r/(1 - r) whenever the paired
bound r is below one.

For rational parameters and moderate precision the partial sums are exact
rationals, which makes the bound the only error source; at higher
precision the terms are tracked in mpmath arithmetic and an explicit
rounding allowance is folded into the reported radius.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf

from .errors import InputError, NumericalFailureError, ParameterPoleError
from .kernel import BoundedValue, mpf_from_fraction

#: Largest requested precision served by exact rational partial sums.
EXACT_DIGITS_LIMIT = 100

#: Series argument shared by the whole family: 27/64 = (3/4)^3.
FAMILY_Z = Fraction(27, 64)

#: Parameter offsets of the six-member 7F6 family; the first upper slot
#: holds the member index k = 1..6.
FAMILY_UPPER_OFFSETS = (Fraction(2, 5), Fraction(3, 5), Fraction(4, 5),
                        Fraction(5, 6), Fraction(7, 6), Fraction(6, 5))
FAMILY_LOWER_OFFSETS = (Fraction(13, 10), Fraction(3, 2), Fraction(17, 10),
                        Fraction(19, 10), Fraction(2), Fraction(21, 10))


def _nonpositive_int(q: Fraction) -> bool:
    return q.denominator == 1 and q <= 0


@dataclass(frozen=True)
class HypergeometricSpec:
    """Parameter lists and argument of a pFq series (all exact rationals)."""

    upper: tuple[Fraction, ...]
    lower: tuple[Fraction, ...]
    z: Fraction

    def __init__(self, upper, lower, z):
        object.__setattr__(self, "upper", tuple(Fraction(a) for a in upper))
        object.__setattr__(self, "lower", tuple(Fraction(b) for b in lower))
        object.__setattr__(self, "z", Fraction(z))
        self._validate()

    def _validate(self):
        term = self.terminates_after()
        for b in self.lower:
            if _nonpositive_int(b) and (term is None or term > -b):
                raise ParameterPoleError(b)
        if term is None:
            p, q = len(self.upper), len(self.lower)
            if self.z != 0:
                if p > q + 1:
                    raise InputError(
                        f"series {p}F{q} diverges for z != 0 unless it terminates"
                    )
                if p == q + 1 and abs(self.z) >= 1:
                    raise InputError(f"|z| = {abs(self.z)} >= 1: series does not converge")

    def terminates_after(self) -> int | None:
        """Largest surviving term index m if some upper parameter is a
        nonpositive integer (the sum then has m + 1 terms), else None."""
        cutoffs = [int(-a) for a in self.upper if _nonpositive_int(a)]
        return min(cutoffs) if cutoffs else None


def family_member_spec(alpha: Fraction, k: int) -> HypergeometricSpec:
    """The k-th member of the 7F6 family at parameter alpha, argument 27/64."""
    if not 1 <= k <= 6:
        raise InputError(f"family index k must be in 1..6, got {k}")
    alpha = Fraction(alpha)
    upper = [Fraction(k)] + [alpha + off for off in FAMILY_UPPER_OFFSETS]
    lower = [alpha + off for off in FAMILY_LOWER_OFFSETS]
    return HypergeometricSpec(upper, lower, FAMILY_Z)


def _ratio_sup(spec: HypergeometricSpec, n: int) -> Fraction:
    """Upper bound on |t_{m+1}/t_m| valid for every m >= n (requires all
    shifted parameters positive at n)."""
    ups = sorted(spec.upper, reverse=True)
    lows = sorted(list(spec.lower) + [Fraction(1)], reverse=True)
    r = abs(spec.z)
    for a, b in zip(ups, lows):
        if a > b:
            r *= (a + n) / (b + n)
    # p <= q: leftover lower factors only shrink the ratio; ignoring them
    # keeps the bound valid.
    return r


def pfq_eval(spec: HypergeometricSpec, digits: int) -> BoundedValue:
    """Evaluate the series with a certified radius below 10^-digits."""
    if digits < 1:
        raise InputError("digits must be positive")
    if spec.z == 0:   # only the n = 0 term survives
        return BoundedValue(midpoint=mpf(1), radius=mpf(0), exact=Fraction(1))
    term_cut = spec.terminates_after()
    if term_cut is not None:
        return _eval_terminating(spec, term_cut, digits)
    if digits <= EXACT_DIGITS_LIMIT:
        return _eval_exact(spec, digits)
    return _eval_float(spec, digits)


def _eval_terminating(spec: HypergeometricSpec, cut: int, digits: int) -> BoundedValue:
    total = Fraction(1)
    term = Fraction(1)
    for n in range(cut):
        factor = spec.z / (n + 1)
        for a in spec.upper:
            factor *= a + n
        for b in spec.lower:
            factor /= b + n
        term *= factor
        total += term
    return BoundedValue(
        midpoint=mpf_from_fraction(total, digits + 10),
        radius=mpf(0),
        exact=total,
    )


def _start_index(spec: HypergeometricSpec) -> int:
    n0 = 1
    for p in spec.upper + spec.lower:
        if p <= 0:
            n0 = max(n0, int(-p) + 2)
    return n0


def _eval_exact(spec: HypergeometricSpec, digits: int) -> BoundedValue:
    tol = Fraction(1, 10 ** digits) / 2
    n0 = _start_index(spec)
    total = Fraction(1)
    term = Fraction(1)
    n = 0
    while True:
        factor = spec.z / (n + 1)
        for a in spec.upper:
            factor *= a + n
        for b in spec.lower:
            factor /= b + n
        term *= factor
        total += term
        n += 1
        if n >= n0:
            r = _ratio_sup(spec, n)
            if r < 1:
                tail = abs(term) * r / (1 - r)
                if tail <= tol:
                    return BoundedValue(
                        midpoint=mpf_from_fraction(total, digits + 10),
                        radius=mpf_from_fraction(tail, 10) + mpf(10) ** (-(digits + 6)),
                    )
        if n > 1_000_000:
            raise NumericalFailureError("series did not converge within 10^6 terms")


def _eval_float(spec: HypergeometricSpec, digits: int) -> BoundedValue:
    # estimated term count: |z|^n decay dominates for p = q+1
    est_terms = 200 + int(digits * 4)
    wp = digits + 15 + len(str(est_terms))
    with mp.workdps(wp):
        z = mpf_from_fraction(spec.z, wp)
        uppers = [mpf_from_fraction(a, wp) for a in spec.upper]
        lowers = [mpf_from_fraction(b, wp) for b in spec.lower]
        tol = mpf(10) ** (-digits) / 4
        n0 = _start_index(spec)
        total = mpf(1)
        abs_total = mpf(1)
        term = mpf(1)
        n = 0
        while True:
            factor = z / (n + 1)
            for a in uppers:
                factor *= a + n
            for b in lowers:
                factor /= b + n
            term *= factor
            total += term
            abs_total += abs(term)
            n += 1
            if n >= n0:
                r = _ratio_sup(spec, n)
                if r < 1:
                    rf = mpf_from_fraction(r, 20)
                    tail = abs(term) * rf / (1 - rf)
                    if tail <= tol:
                        rounding = 30 * n * mpf(10) ** (-wp) * (abs_total + 1)
                        radius = tail + rounding
                        break
            if n > 2_000_000:
                raise NumericalFailureError("series did not converge within 2*10^6 terms")
        if radius > mpf(10) ** (-digits):
            raise NumericalFailureError(
                "rounding allowance exceeded the requested radius; raise digits"
            )
        midpoint = +total
    with mp.workdps(digits + 10):
        return BoundedValue(midpoint=+midpoint, radius=+radius)


def family_member_eval(alpha: Fraction, k: int, digits: int) -> BoundedValue:
    """Evaluate family member k at parameter alpha to ``digits`` digits."""
    spec = family_member_spec(alpha, k)   # raises ParameterPoleError at poles
    return pfq_eval(spec, digits)

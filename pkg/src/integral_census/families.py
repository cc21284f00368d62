"""Curve models, the four enumerated families, and the size/shape filters.

Curves are short Weierstrass models y^2 = x^3 + a x + b with integer
coefficients, ordered by the naive height max(4|a|^3, 27 b^2)^(1/6).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import mpmath as mp
import sympy

__all__ = [
    "CurveModel",
    "Family",
    "FilterDiagnostics",
    "discriminant",
    "naive_height",
    "squarefull_part",
    "is_family_member",
    "enumerate_family",
    "filter_diagnostics",
]


@dataclass(frozen=True, order=True)
class CurveModel:
    """y^2 = x^3 + a x + b; callers must reject discriminant zero."""

    a: int
    b: int

    def disc(self) -> int:
        return discriminant(self.a, self.b)

    def to_record(self) -> dict:
        # decimal strings keep arbitrary-precision coefficients JSON-safe
        return {"a": str(self.a), "b": str(self.b)}


class Family(Enum):
    UNIVERSAL = "universal"
    MORDELL = "mordell"
    B0 = "b0"
    CONGRUENT = "congruent"

    @classmethod
    def from_token(cls, token: str) -> "Family":
        for fam in cls:
            if fam.value == token:
                return fam
        raise ValueError(f"unknown family token {token!r}")


@dataclass
class FilterDiagnostics:
    """Flags for the size/shape filter and the small-point filter.

    The five condition_flags entries cover, in order: |A| large, |B| large
    and non-square, gcd(A, B) small, |Delta| large, squarefull part of
    Delta small.  small_integral / small_rational flag the absence of
    small points.  passes_size is the AND of the five; passes_all also
    requires both small-point flags.
    """

    condition_flags: tuple[bool, bool, bool, bool, bool]
    small_integral: bool
    small_rational: bool
    delta: float
    T: float

    @property
    def passes_size(self) -> bool:
        return all(self.condition_flags)

    @property
    def passes_all(self) -> bool:
        return self.passes_size and self.small_integral and self.small_rational


def discriminant(a: int, b: int) -> int:
    """-16(4a^3 + 27b^2); zero means the cubic is singular."""
    return -16 * (4 * a**3 + 27 * b**2)


def naive_height(a: int, b: int) -> mp.mpf:
    """max(4|a|^3, 27 b^2)^(1/6) at 50 significant digits."""
    with mp.workdps(50):
        m = max(4 * abs(a) ** 3, 27 * b * b)
        return mp.mpf(m) ** (mp.mpf(1) / 6)


def squarefull_part(n: int, time_budget: float | None = None) -> int:
    """Product of p^v_p(n) over primes with p^2 | n.

    time_budget is accepted for interface stability; factorization of every
    value arising at suite scale is instant, so no cutoff is enforced.
    """
    if n == 0:
        raise ValueError("squarefull_part requires nonzero input")
    out = 1
    for p, e in sympy.factorint(abs(n)).items():
        if e >= 2:
            out *= p**e
    return out


def _quasiminimal(a: int, b: int) -> bool:
    # p^4 | a must not come with p^6 | b
    if a == 0:
        return not _has_sixth_power(b)
    for p, e in sympy.factorint(abs(a)).items():
        if e >= 4 and b % p**6 == 0:
            return False
    return True


def _has_sixth_power(n: int) -> bool:
    if n == 0:
        return True
    return any(e >= 6 for e in sympy.factorint(abs(n)).values())


def _has_fourth_power(n: int) -> bool:
    if n == 0:
        return True
    return any(e >= 4 for e in sympy.factorint(abs(n)).values())


def _squarefree_positive(n: int) -> bool:
    if n <= 0:
        return False
    return all(e == 1 for e in sympy.factorint(n).values())


def is_family_member(curve: CurveModel, family: Family) -> bool:
    a, b = curve.a, curve.b
    if discriminant(a, b) == 0:
        return False
    if family is Family.UNIVERSAL:
        return _quasiminimal(a, b)
    if family is Family.MORDELL:
        return a == 0 and not _has_sixth_power(b)
    if family is Family.B0:
        return b == 0 and not _has_fourth_power(a)
    if family is Family.CONGRUENT:
        if b != 0 or a >= 0:
            return False
        d = math.isqrt(-a)
        return d * d == -a and _squarefree_positive(d)
    raise ValueError(family)


def _coeff_bounds(T: float) -> tuple[int, int]:
    # naive_height <= T  <=>  4|a|^3 <= T^6 and 27 b^2 <= T^6
    t6 = mp.mpf(T) ** 6
    a_max = int(mp.floor((t6 / 4) ** (mp.mpf(1) / 3)))
    while 4 * (a_max + 1) ** 3 <= t6:
        a_max += 1
    while a_max > 0 and 4 * a_max**3 > t6:
        a_max -= 1
    b_max = int(mp.floor(mp.sqrt(t6 / 27)))
    while 27 * (b_max + 1) ** 2 <= t6:
        b_max += 1
    while b_max > 0 and 27 * b_max**2 > t6:
        b_max -= 1
    return a_max, b_max


def enumerate_family(family: Family, T: float) -> Iterator[CurveModel]:
    """Family members of naive height <= T, lexicographic on (a, b)."""
    if T < 1:
        raise ValueError("T must be >= 1")
    a_max, b_max = _coeff_bounds(T)
    if family is Family.UNIVERSAL:
        for a in range(-a_max, a_max + 1):
            for b in range(-b_max, b_max + 1):
                c = CurveModel(a, b)
                if is_family_member(c, family):
                    yield c
    elif family is Family.MORDELL:
        for b in range(-b_max, b_max + 1):
            c = CurveModel(0, b)
            if is_family_member(c, family):
                yield c
    elif family is Family.B0:
        for a in range(-a_max, a_max + 1):
            c = CurveModel(a, 0)
            if is_family_member(c, family):
                yield c
    elif family is Family.CONGRUENT:
        # height of y^2 = x^3 - D^2 x is 4^(1/6) D
        d_max = int(mp.floor(mp.mpf(T) * mp.mpf(4) ** (mp.mpf(-1) / 6)))
        while naive_height(-((d_max + 1) ** 2), 0) <= T:
            d_max += 1
        for d in range(1, d_max + 1):
            if _squarefree_positive(d):
                yield CurveModel(-d * d, 0)
    else:
        raise ValueError(family)


def _is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def filter_diagnostics(
    curve: CurveModel,
    T: float,
    delta: float,
    x_bound_cap: int | None = None,
    lazy: bool = False,
) -> FilterDiagnostics:
    """Evaluate the size/shape flags and the small-point flags.

    With lazy=True the expensive checks (factorization, point searches) are
    skipped as soon as a cheap size flag has already failed; the skipped
    flags are reported False, which is sound for passes_size/passes_all
    consumers.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    a, b = curve.a, curve.b
    disc = curve.disc()
    with mp.workdps(30):
        Tm = mp.mpf(T)
        a_big = abs(a) >= Tm ** (2 - delta)
        b_big = abs(b) >= Tm ** (3 - delta) and not _is_square(b)
        gcd_small = math.gcd(a, b) <= Tm**delta
        disc_big = abs(disc) >= Tm ** (6 - 2 * delta)
        if lazy and not (a_big and b_big and gcd_small and disc_big):
            return FilterDiagnostics(
                (a_big, b_big, gcd_small, disc_big, False),
                False,
                False,
                delta,
                float(T),
            )
        sf_small = squarefull_part(disc) <= Tm ** (4 * delta)

        # no integral point of height <= (5 - delta) log T, i.e. |x| <= T^(5-delta)
        x_cut = int(mp.floor(Tm ** (5 - delta)))
        if x_bound_cap is not None:
            x_cut = min(x_cut, x_bound_cap)
        from . import points  # local import: avoid a cycle at module load

        small_int = len(points.integral_points(curve, x_cut)) == 0

        # no rational point of height <= (1/2 - delta) log T: numerators
        # |x| <= T^(1/2 - delta), denominators d <= T^(1/4 - delta/2)
        num_cut = int(mp.floor(Tm ** (mp.mpf(1) / 2 - delta)))
        den_cut = int(mp.floor(Tm ** (mp.mpf(1) / 4 - delta / 2)))
        small_rat = not _has_small_rational_point(curve, num_cut, den_cut)
    return FilterDiagnostics(
        (a_big, b_big, gcd_small, disc_big, sf_small),
        small_int,
        small_rat,
        delta,
        float(T),
    )


def _has_small_rational_point(curve: CurveModel, num_cut: int, den_cut: int) -> bool:
    # x = u / d^2 with |u| <= num_cut * d^2 bounded by the height cut on x
    a, b = curve.a, curve.b
    for d in range(1, den_cut + 1):
        d2, d6 = d * d, d**6
        for u in range(-num_cut * d2, num_cut * d2 + 1):
            if d > 1 and math.gcd(u, d) != 1:
                continue
            val = u**3 + a * u * d2 * d2 + b * d6
            if val >= 0 and _is_square(val):
                return True
    return False

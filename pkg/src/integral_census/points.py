"""Exact group law, integral-point censuses, and small-point statistics.

The x-scan dispatches to a compiled int64 kernel when the arithmetic
provably fits in 64 bits, and to a pure-Python big-int scanner otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .families import CurveModel, Family, enumerate_family

try:
    from . import _scan as _fast_scan
except ImportError:  # extension not built; big-int path covers everything
    _fast_scan = None
from . import _scan_py as _pure_scan

__all__ = [
    "Identity",
    "CurvePoint",
    "CensusRow",
    "CensusSummary",
    "on_curve",
    "add",
    "negate",
    "integral_points",
    "mod3_obstruction",
    "census",
    "small_point_statistics",
    "scan_backend_name",
]

# largest magnitude the int64 kernel may see with slack: |x|^3 + |a||x| + |b|
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class CurvePoint:
    """Affine point with exact rational coordinates, or the identity."""

    x: Fraction | None = None
    y: Fraction | None = None

    @property
    def is_identity(self) -> bool:
        return self.x is None

    @staticmethod
    def affine(x, y) -> "CurvePoint":
        return CurvePoint(Fraction(x), Fraction(y))


Identity = CurvePoint()


@dataclass
class CensusRow:
    curve: CurveModel
    integral_count: int
    points: list[tuple[int, int]]
    x_bound_used: int


@dataclass
class CensusSummary:
    total_points: int
    curve_count: int
    average: float
    rows: list[CensusRow] = field(default_factory=list)


def on_curve(curve: CurveModel, p: CurvePoint) -> bool:
    if p.is_identity:
        return True
    return p.y * p.y == p.x**3 + curve.a * p.x + curve.b


def negate(p: CurvePoint) -> CurvePoint:
    if p.is_identity:
        return p
    return CurvePoint(p.x, -p.y)


def add(curve: CurveModel, p: CurvePoint, q: CurvePoint) -> CurvePoint:
    """Chord-tangent group law, exact in rationals."""
    for pt in (p, q):
        if not on_curve(curve, pt):
            raise ValueError("point not on curve")
    if p.is_identity:
        return q
    if q.is_identity:
        return p
    if p.x == q.x:
        if p.y == -q.y:
            return Identity
        # tangent: 2y != 0 here since y = -y was excluded
        slope = (3 * p.x * p.x + curve.a) / (2 * p.y)
    else:
        slope = (q.y - p.y) / (q.x - p.x)
    x3 = slope * slope - p.x - q.x
    y3 = slope * (p.x - x3) - p.y
    return CurvePoint(x3, y3)


def _scan(a: int, b: int, x_lo: int, x_hi: int) -> list[tuple[int, int]]:
    if _fast_scan is not None:
        m = max(abs(x_lo), abs(x_hi))
        if m**3 + abs(a) * m + abs(b) < _INT64_SAFE:
            return _fast_scan.scan_range(a, b, x_lo, x_hi)
    return _pure_scan.scan_range(a, b, x_lo, x_hi)


def scan_backend_name() -> str:
    return "compiled" if _fast_scan is not None else "pure-python"


def integral_points(curve: CurveModel, x_bound: int) -> list[tuple[int, int]]:
    """All (x, y) in Z^2 on the curve with |x| <= x_bound, sorted by (x, y)."""
    if x_bound < 1:
        raise ValueError("x_bound must be >= 1")
    out: list[tuple[int, int]] = []
    for x, y in _scan(curve.a, curve.b, -x_bound, x_bound):
        out.append((x, y))
        if y != 0:
            out.append((x, -y))
    out.sort()
    return out


def mod3_obstruction(curve: CurveModel) -> bool:
    """(a, b) = (2, 2) mod 3 forces x^3 + ax + b = 2 mod 3, a non-residue."""
    return curve.a % 3 == 2 and curve.b % 3 == 2


def census(
    family: Family,
    T: float,
    x_bound: int,
    curves: Sequence[CurveModel] | None = None,
    mapper=map,
) -> CensusSummary:
    """Integral-point counts per curve plus the family average.

    mapper lets callers supply an executor map; merging is order-preserving
    so results are deterministic for any worker count.
    """
    if T < 1 or x_bound < 1:
        raise ValueError("T and x_bound must be >= 1")
    if curves is None:
        curves = list(enumerate_family(family, T))
    if not curves:
        raise ValueError("empty family slice")
    rows = list(mapper(_census_one, [(c, x_bound) for c in curves]))
    total = sum(r.integral_count for r in rows)
    return CensusSummary(total, len(rows), total / len(rows), rows)


def _census_one(args: tuple[CurveModel, int]) -> CensusRow:
    curve, x_bound = args
    pts = integral_points(curve, x_bound)
    return CensusRow(curve, len(pts), pts, x_bound)


def small_point_statistics(family: Family, T: float, exponent: float) -> dict:
    """Count (x, y, curve) triples with |x| <= T^exponent over the family."""
    if not 0 <= exponent <= 6:
        raise ValueError("exponent must lie in [0, 6]")
    x_cut = max(1, int(float(T) ** exponent))
    if exponent == 0:
        x_cut = 1
    curves = list(enumerate_family(family, T))
    triple_count = sum(len(integral_points(c, x_cut)) for c in curves)
    size = len(curves)
    return {
        "triple_count": triple_count,
        "family_size": size,
        "ratio": triple_count / size if size else float("nan"),
    }

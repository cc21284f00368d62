"""Division polynomials, multiplication-by-n, and identity verification.

Symbolic psi_n live in Z[x, A, B] with at most one explicit factor of y
(y^2 always eliminated via the curve equation).  Weighted homogeneity
(x:1, A:2, B:3, y:3/2) makes the x-exponent of every monomial implicit,
so terms are stored keyed by (f_A, f_B) alone.

Point multiplication never builds symbolic polynomials; it runs the same
recursion on exact rational values.
"""

from __future__ import annotations

import json
import os
import pickle
from dataclasses import dataclass
from fractions import Fraction

from .families import CurveModel
from .points import CurvePoint, Identity, add, negate, on_curve

__all__ = [
    "DivPoly",
    "DEFAULT_N_MAX",
    "psi",
    "psi_value",
    "multiply_point",
    "verify_coeff_growth",
    "triple_root_identity_check",
    "denominator_of_multiple",
]

DEFAULT_N_MAX = 64
CACHE_ENV = "INTEGRAL_CENSUS_CACHE"


@dataclass(frozen=True)
class DivPoly:
    """y^y_factor times a weighted-homogeneous element of Z[x, A, B].

    xpart_weight is the weight of the x-part; a term keyed (f_A, f_B) has
    f_x = xpart_weight - 2 f_A - 3 f_B.
    """

    n: int
    y_factor: int
    xpart_weight: int
    xterms: dict

    @property
    def terms(self) -> dict:
        """Mapping (f_x, f_A, f_B) -> coefficient."""
        out = {}
        for (fa, fb), c in self.xterms.items():
            out[(self.xpart_weight - 2 * fa - 3 * fb, fa, fb)] = c
        return out

    def x_degree(self) -> int:
        return max((fx for (fx, _, _) in self.terms), default=0)

    def x_leading_coeff(self) -> int:
        d = self.x_degree()
        return sum(c for (fx, _, _), c in self.terms.items() if fx == d)

    def x_coeff(self, fx_target: int) -> dict:
        """Coefficient of x^fx_target as a map (f_A, f_B) -> int."""
        return {
            (fa, fb): c
            for (fx, fa, fb), c in self.terms.items()
            if fx == fx_target
        }

    def dump_terms(self) -> list[dict]:
        return [
            {"f_x": fx, "f_A": fa, "f_B": fb, "coeff": str(c)}
            for (fx, fa, fb), c in sorted(self.terms.items())
        ]


# ---------------------------------------------------------------------------
# internal weighted-polynomial arithmetic on (weight, {(fA,fB): int}) pairs


def _wmul(w1: int, t1: dict, w2: int, t2: dict) -> tuple[int, dict]:
    out: dict = {}
    for (a1, b1), c1 in t1.items():
        for (a2, b2), c2 in t2.items():
            k = (a1 + a2, b1 + b2)
            out[k] = out.get(k, 0) + c1 * c2
    return w1 + w2, {k: c for k, c in out.items() if c}


def _wsub(w1: int, t1: dict, w2: int, t2: dict) -> tuple[int, dict]:
    if t1 and t2 and w1 != w2:
        raise ValueError("weight mismatch in subtraction")
    out = dict(t1)
    for k, c in t2.items():
        out[k] = out.get(k, 0) - c
    return (w1 if t1 else w2), {k: c for k, c in out.items() if c}


def _wscale_div(terms: dict, d: int) -> dict:
    out = {}
    for k, c in terms.items():
        q, r = divmod(c, d)
        if r:
            raise ArithmeticError("non-integral coefficient in psi recursion")
        out[k] = q
    return out


# curve polynomial x^3 + A x + B (weight 3) used to eliminate y^2
_CURVE_W = 3
_CURVE_T = {(0, 0): 1, (1, 0): 1, (0, 1): 1}

_BASE = {
    0: (0, -1, {}),  # zero polynomial (weight unused)
    1: (0, 0, {(0, 0): 1}),
    2: (1, 0, {(0, 0): 2}),
    3: (0, 4, {(0, 0): 3, (1, 0): 6, (0, 1): 12, (2, 0): -1}),
    4: (
        1,
        6,
        {
            (0, 0): 4,
            (1, 0): 20,
            (0, 1): 80,
            (2, 0): -20,
            (1, 1): -16,
            (0, 2): -32,
            (3, 0): -4,
        },
    ),
}

_psi_cache: dict[int, DivPoly] = {}


def _cache_path(n: int) -> str | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    os.makedirs(root, exist_ok=True)
    return os.path.join(root, f"psi_{n}.pkl")


def psi(n: int, n_max: int = DEFAULT_N_MAX) -> DivPoly:
    """Symbolic n-th division polynomial, canonical form."""
    if n < 1:
        raise ValueError("psi requires n >= 1")
    if n > n_max:
        raise ValueError(f"n = {n} exceeds n_max = {n_max}")
    return _psi(n)


def _psi(n: int) -> DivPoly:
    if n in _psi_cache:
        return _psi_cache[n]
    path = _cache_path(n)
    if path and os.path.exists(path):
        with open(path, "rb") as fh:
            poly = pickle.load(fh)
        _psi_cache[n] = poly
        return poly
    if n in _BASE:
        yf, w, t = _BASE[n]
        poly = DivPoly(n, yf, w, t)
    elif n % 2 == 1:
        m = (n - 1) // 2
        pm2, pm, pm1_, pp1 = _psi(m + 2), _psi(m), _psi(m - 1), _psi(m + 1)
        # odd result is y-free; whichever side carries y^4 picks up curve^2
        t_a = _wpow3_mul(pm2, pm)
        t_b = _wpow3_mul(pm1_, pp1)
        if m % 2 == 0:
            t_a = _wmul(*_wmul(_CURVE_W, _CURVE_T, _CURVE_W, _CURVE_T), *t_a)
        else:
            t_b = _wmul(*_wmul(_CURVE_W, _CURVE_T, _CURVE_W, _CURVE_T), *t_b)
        w, t = _wsub(*t_a, *t_b)
        poly = DivPoly(n, 0, w, t)
    else:
        m = n // 2
        pm2, pm1_, pm, pp1, pp2 = (
            _psi(m - 2),
            _psi(m - 1),
            _psi(m),
            _psi(m + 1),
            _psi(m + 2),
        )
        # t = Px(m+2) Px(m-1)^2 - Px(m-2) Px(m+1)^2 on y-stripped parts
        sq1 = _wmul(pm1_.xpart_weight, pm1_.xterms, pm1_.xpart_weight, pm1_.xterms)
        sq2 = _wmul(pp1.xpart_weight, pp1.xterms, pp1.xpart_weight, pp1.xterms)
        ta = _wmul(pp2.xpart_weight, pp2.xterms, *sq1)
        tb = _wmul(pm2.xpart_weight, pm2.xterms, *sq2)
        w, t = _wsub(*ta, *tb)
        w, t = _wmul(pm.xpart_weight, pm.xterms, w, t)
        poly = DivPoly(n, 1, w, _wscale_div(t, 2))
    _psi_cache[n] = poly
    if path:
        with open(path, "wb") as fh:
            pickle.dump(poly, fh)
    return poly


def _wpow3_mul(p_lin: DivPoly, p_cub: DivPoly) -> tuple[int, dict]:
    # x-parts of p_lin * p_cub^3
    sq = _wmul(p_cub.xpart_weight, p_cub.xterms, p_cub.xpart_weight, p_cub.xterms)
    cu = _wmul(*sq, p_cub.xpart_weight, p_cub.xterms)
    return _wmul(p_lin.xpart_weight, p_lin.xterms, *cu)


# ---------------------------------------------------------------------------
# numeric psi values at a point (y^2 eliminated through the actual y value)


def psi_value(curve: CurveModel, p: CurvePoint, n: int) -> Fraction:
    """psi_n evaluated at an affine point, exact rational."""
    if p.is_identity:
        raise ValueError("affine point required")
    memo: dict[int, Fraction] = {}
    return _psi_val(n, p.x, p.y, curve.a, curve.b, memo)


def _psi_val(n, x, y, a, b, memo) -> Fraction:
    if n in memo:
        return memo[n]
    if n == 0:
        v = Fraction(0)
    elif n == 1:
        v = Fraction(1)
    elif n == 2:
        v = 2 * y
    elif n == 3:
        v = 3 * x**4 + 6 * a * x**2 + 12 * b * x - a * a
    elif n == 4:
        v = 4 * y * (
            x**6
            + 5 * a * x**4
            + 20 * b * x**3
            - 5 * a * a * x**2
            - 4 * a * b * x
            - 8 * b * b
            - a**3
        )
    elif n % 2 == 1:
        m = (n - 1) // 2
        v = (
            _psi_val(m + 2, x, y, a, b, memo) * _psi_val(m, x, y, a, b, memo) ** 3
            - _psi_val(m - 1, x, y, a, b, memo)
            * _psi_val(m + 1, x, y, a, b, memo) ** 3
        )
    else:
        m = n // 2
        if y == 0:
            raise ZeroDivisionError("two-torsion point in even psi recursion")
        v = (
            _psi_val(m, x, y, a, b, memo)
            * (
                _psi_val(m + 2, x, y, a, b, memo)
                * _psi_val(m - 1, x, y, a, b, memo) ** 2
                - _psi_val(m - 2, x, y, a, b, memo)
                * _psi_val(m + 1, x, y, a, b, memo) ** 2
            )
            / (2 * y)
        )
    memo[n] = v
    return v


def multiply_point(
    curve: CurveModel, p: CurvePoint, n: int, n_max: int = DEFAULT_N_MAX
) -> CurvePoint:
    """n P via the division-polynomial formulas, exact in rationals."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > n_max:
        raise ValueError(f"n = {n} exceeds n_max = {n_max}")
    if not on_curve(curve, p):
        raise ValueError("point not on curve")
    if p.is_identity:
        return Identity
    if n == 1:
        return p
    if p.y == 0:
        # 2-torsion: the even-psi recursion divides by 2y, handle directly
        return p if n % 2 == 1 else Identity
    memo: dict[int, Fraction] = {}
    a, b = curve.a, curve.b
    pn = _psi_val(n, p.x, p.y, a, b, memo)
    if pn == 0:
        return Identity
    pnm = _psi_val(n - 1, p.x, p.y, a, b, memo)
    pnp = _psi_val(n + 1, p.x, p.y, a, b, memo)
    p2n = _psi_val(2 * n, p.x, p.y, a, b, memo)
    x_n = p.x - pnm * pnp / (pn * pn)
    y_n = p2n / (2 * pn**4)
    return CurvePoint(x_n, y_n)


def verify_coeff_growth(
    n_max: int, K1: float, K2: float, K3: float
) -> dict:
    """Check |C_f| <= K1 n^K2 K3^((log n)^2 (w_n - f_x)) over y-stripped psi_n.

    Returns the worst ratio |C_f| / bound and its witness.
    """
    import math

    if K1 <= 1 or K3 <= 1 or K2 < 0:
        raise ValueError("require K1 > 1, K3 > 1, K2 >= 0")
    worst = 0.0
    witness = None
    for n in range(2, n_max + 1):
        poly = psi(n, n_max=max(n_max, DEFAULT_N_MAX))
        logn = math.log(n)
        for (fx, fa, fb), c in poly.terms.items():
            # weight of the stripped part minus f_x equals 2 f_A + 3 f_B
            expo = logn * logn * (2 * fa + 3 * fb)
            log_bound = math.log(K1) + K2 * logn + expo * math.log(K3)
            ratio = math.exp(math.log(abs(c)) - log_bound)
            if ratio > worst:
                worst = ratio
                witness = {"n": n, "f_x": fx, "f_A": fa, "f_B": fb, "coeff": str(c)}
    return {"worst_ratio": worst, "witness": witness, "all_within": worst <= 1.0}


def triple_root_identity_check(
    curve: CurveModel, r_point: CurvePoint, sample_count: int, seed: int = 0
) -> bool:
    """Cross-check the two routes to psi3^2 (x(3Q) - x(R)) at random arguments.

    Route one evaluates x(3Q) = x - psi2 psi4 / psi3^2 through the numeric
    value recursion (y^2 eliminated via the curve equation); route two
    evaluates the degree-9 polynomial assembled from the symbolic psi_n.
    The polynomial is monic of x-degree 9.
    """
    import random

    if r_point.is_identity:
        raise ValueError("affine r_point required")
    if not on_curve(curve, r_point):
        raise ValueError("r_point not on curve")
    a, b = Fraction(curve.a), Fraction(curve.b)
    xr = r_point.x
    coeffs = _triple_root_poly_coeffs(curve, xr)
    if len(coeffs) - 1 != 9 or coeffs[9] != 1:
        return False
    rng = random.Random(seed)
    for _ in range(sample_count):
        x0 = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**3))
        y2 = x0**3 + a * x0 + b
        psi3 = 3 * x0**4 + 6 * a * x0**2 + 12 * b * x0 - a * a
        if psi3 == 0 or y2 == 0:
            continue  # pole of x(3Q) or branch point; resample implicitly
        # psi2 psi4 = 8 y^2 (x^6 + 5Ax^4 + 20Bx^3 - 5A^2x^2 - 4ABx - 8B^2 - A^3)
        psi24 = 8 * y2 * (
            x0**6
            + 5 * a * x0**4
            + 20 * b * x0**3
            - 5 * a * a * x0**2
            - 4 * a * b * x0
            - 8 * b * b
            - a**3
        )
        x3q = x0 - psi24 / (psi3 * psi3)
        lhs = psi3 * psi3 * (x3q - xr)
        rhs = sum(c * x0**k for k, c in enumerate(coeffs))
        if lhs != rhs:
            return False
    return True


def _triple_root_poly_coeffs(curve: CurveModel, xr: Fraction) -> list[Fraction]:
    """Coefficients of psi3^2 x - psi2 psi4 - psi3^2 x(R) from symbolic psi."""
    a, b = Fraction(curve.a), Fraction(curve.b)

    def specialize(poly: DivPoly) -> list[Fraction]:
        deg = poly.x_degree()
        out = [Fraction(0)] * (deg + 1)
        for (fx, fa, fb), c in poly.terms.items():
            out[fx] += c * a**fa * b**fb
        return out

    def pmul(u: list[Fraction], v: list[Fraction]) -> list[Fraction]:
        out = [Fraction(0)] * (len(u) + len(v) - 1)
        for i, cu in enumerate(u):
            for j, cv in enumerate(v):
                out[i + j] += cu * cv
        return out

    p3 = specialize(psi(3))
    p4x = specialize(psi(4))  # y-stripped part; psi2*psi4 = 2y * y * p4x = 2 y^2 p4x
    curve_poly = [b, a, Fraction(0), Fraction(1)]
    p24 = pmul([Fraction(2)], pmul(curve_poly, p4x))
    p3sq = pmul(p3, p3)
    out = [Fraction(0)] * 10
    for i, c in enumerate(p3sq):
        out[i + 1] += c  # psi3^2 * x
        out[i] -= c * xr  # - psi3^2 x(R)
    for i, c in enumerate(p24):
        out[i] -= c
    return out


def denominator_of_multiple(
    curve: CurveModel, p: CurvePoint, n: int, n_max: int = DEFAULT_N_MAX
) -> int | None:
    """Denominator of x(nP) in lowest terms; None when nP is the identity."""
    if p.is_identity:
        raise ValueError("affine point required")
    q = multiply_point(curve, p, n, n_max=n_max)
    if q.is_identity:
        return None
    return q.x.denominator


def dump_coefficients(n: int) -> str:
    """JSON dump of psi_n coefficients for external consumption."""
    return json.dumps(psi(n).dump_terms())

"""Weil and canonical heights, local decomposition, pairings, real period.

Normalization: the canonical height is the x-coordinate limit
h(x(2^n P)) / 4^n, so h_hat(2P) = 4 h_hat(P) and h_hat is about h(x(P))
for large points (twice the other common textbook normalization).

The archimedean local height comes from a telescoping series derived from
the duplication relation lambda(2P) = 4 lambda(P) - 2 log|2y(P)|.  The
non-archimedean local heights are computed exactly: double the point in
capped-precision p-adic arithmetic, record the valuations c_j = v_p(2 y_j),
detect the eventually affine-periodic pattern, and sum the telescoping
series in closed form.  No reduction-type case table is needed, and no
minimality assumption is made on the model; the bounded solution of the
local duplication identity is unique, which is what the series computes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from .families import CurveModel
from .points import CurvePoint, Identity, add, negate, on_curve

__all__ = [
    "HeightProfile",
    "PrecisionError",
    "weil_height",
    "canonical_height",
    "height_pairing",
    "height_gap_report",
    "real_period",
    "global_difference_bound",
]


class PrecisionError(ArithmeticError):
    """Requested precision could not be certified within iteration caps."""


@dataclass
class HeightProfile:
    weil: float
    canonical: float
    local: dict = field(default_factory=dict)
    precision_goal: float = 1e-10
    local_exact: dict = field(default_factory=dict)  # prime -> Fraction coeff of log p
    is_torsion: bool = False


def weil_height(p: CurvePoint) -> float:
    """log max(|numerator|, |denominator|) of x(P); identity maps to 0."""
    if p.is_identity:
        return 0.0
    x = p.x
    return float(mp.log(max(abs(x.numerator), x.denominator, 1)))


def global_difference_bound(curve: CurveModel) -> float:
    """Conservative envelope for |h_hat - h| used by oracle tolerances."""
    disc = abs(curve.disc())
    m = max(4 * abs(curve.a) ** 3, 27 * curve.b**2, 1)
    return float(mp.log(disc) / 6 + mp.log(m) / 6 + 4)


# ---------------------------------------------------------------------------
# archimedean local height


def _lambda_inf(curve: CurveModel, x0, precision_goal: float, depth: int = 0):
    """Archimedean local height at a point with x-coordinate x0 (mpf)."""
    a, b = curve.a, curve.b
    if depth > 12:
        raise PrecisionError("archimedean recursion depth exhausted")
    if x0 == 0 or abs(x0) < mp.mpf("0.5"):
        return _lambda_inf_backward(curve, x0, precision_goal, depth)
    t = 1 / x0
    total = mp.log(abs(x0))
    acc = mp.mpf(0)
    recent = mp.mpf(1)
    for n in range(500):
        z = 1 - 2 * a * t * t - 8 * b * t**3 + a * a * t**4
        if z == 0:
            return _lambda_inf_backward(curve, x0, precision_goal, depth)
        term = mp.log(abs(z)) / mp.mpf(4) ** n
        acc += term
        recent = max(abs(mp.log(abs(z))), mp.mpf(1))
        # geometric tail certificate: remaining mass <= recent * 4^-n * 4/3
        if recent / mp.mpf(4) ** n * mp.mpf(4) / 3 < precision_goal / 8:
            return total + acc / 4
        w = 4 * t + 4 * a * t**3 + 4 * b * t**4
        t = w / z
    raise PrecisionError("archimedean series did not converge in 500 terms")


def _lambda_inf_backward(curve: CurveModel, x0, precision_goal: float, depth: int):
    # lambda(P) = (lambda(2P) + 2 log|2y(P)|) / 4, with y^2 from the curve
    a, b = curve.a, curve.b
    y2 = x0**3 + a * x0 + b
    if y2 == 0:
        # 2-torsion x-coordinate: 2P is the identity, lambda of which is 0
        # via the convention that the series contribution vanishes there;
        # fall back to the direct formula on a tiny x-perturbation.
        raise PrecisionError("archimedean height at a branch point")
    x2 = (x0 * x0 - a) ** 2 - 8 * b * x0
    x2 /= 4 * y2
    lam2 = _lambda_inf(curve, x2, precision_goal, depth + 1)
    return (lam2 + mp.log(abs(4 * y2))) / 4


# ---------------------------------------------------------------------------
# capped-precision p-adic arithmetic


class _PAdic:
    """p-adic number known modulo p^aprec, stored as p^val * unit."""

    __slots__ = ("p", "val", "unit", "aprec")

    def __init__(self, p, val, unit, aprec):
        self.p = p
        if unit == 0:
            self.val = aprec  # exact-zero-so-far marker
            self.unit = 0
        else:
            self.val = val
            self.unit = unit
        self.aprec = aprec

    @staticmethod
    def from_fraction(p: int, q: Fraction, digits: int) -> "_PAdic":
        num, den = q.numerator, q.denominator
        if num == 0:
            return _PAdic(p, digits, 0, digits)
        vn = _vp(num, p)
        vd = _vp(den, p)
        val = vn - vd
        k = digits
        mod = p ** k
        un = (num // p**vn) % mod
        ud = (den // p**vd) % mod
        unit = un * pow(ud, -1, mod) % mod
        return _PAdic(p, val, unit, val + k)

    def _norm(self):
        # re-extract extra valuation hiding in the unit after add/sub
        if self.unit == 0:
            self.val = self.aprec
            return self
        v = _vp(self.unit, self.p)
        if v:
            self.val += v
            self.unit //= self.p**v
        k = self.aprec - self.val
        if k <= 0:
            self.unit = 0
            self.val = self.aprec
        else:
            self.unit %= self.p**k
            if self.unit == 0:
                self.val = self.aprec
        return self

    def is_unknown_zero(self) -> bool:
        return self.unit == 0

    def mul(self, o: "_PAdic") -> "_PAdic":
        aprec = min(self.aprec + o.val, o.aprec + self.val)
        val = self.val + o.val
        if self.unit == 0 or o.unit == 0:
            return _PAdic(self.p, aprec, 0, aprec)
        k = aprec - val
        unit = (self.unit * o.unit) % self.p**k if k > 0 else 0
        return _PAdic(self.p, val, unit, aprec)._norm()

    def div(self, o: "_PAdic") -> "_PAdic":
        if o.unit == 0:
            raise PrecisionError("p-adic division by unresolved zero")
        aprec = min(self.aprec - o.val, o.aprec + self.val - 2 * o.val)
        val = self.val - o.val
        if self.unit == 0:
            return _PAdic(self.p, aprec, 0, aprec)
        k = aprec - val
        if k <= 0:
            return _PAdic(self.p, aprec, 0, aprec)
        mod = self.p**k
        unit = self.unit % mod * pow(o.unit % mod, -1, mod) % mod
        return _PAdic(self.p, val, unit, aprec)._norm()

    def add(self, o: "_PAdic") -> "_PAdic":
        aprec = min(self.aprec, o.aprec)
        v = min(self.val, o.val)
        k = aprec - v
        if k <= 0:
            return _PAdic(self.p, aprec, 0, aprec)
        mod = self.p**k
        s = (self.unit * self.p ** (self.val - v) + o.unit * self.p ** (o.val - v)) % mod
        return _PAdic(self.p, v, s, aprec)._norm()

    def sub(self, o: "_PAdic") -> "_PAdic":
        return self.add(_PAdic(o.p, o.val, -o.unit % (o.p ** max(o.aprec - o.val, 1)) if o.unit else 0, o.aprec))

    def scalar(self, c: int) -> "_PAdic":
        return self.mul(_PAdic.from_fraction(self.p, Fraction(c), self.aprec - self.val + 8))


def _vp(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _padic_valuation_sequence(
    curve: CurveModel, p: int, pt: CurvePoint, count: int, digits: int
) -> list[int]:
    """c_j = v_p(2 y(2^j P)) for j = 0..count-1."""
    a = _PAdic.from_fraction(p, Fraction(curve.a), digits)
    x = _PAdic.from_fraction(p, pt.x, digits)
    y = _PAdic.from_fraction(p, pt.y, digits)
    three = _PAdic.from_fraction(p, Fraction(3), digits)
    two = _PAdic.from_fraction(p, Fraction(2), digits)
    out = []
    for _ in range(count):
        ty = two.mul(y)
        if ty.is_unknown_zero():
            raise PrecisionError("p-adic precision exhausted in doubling")
        out.append(ty.val)
        num = three.mul(x).mul(x).add(a)
        m = num.div(ty)
        x2 = m.mul(m).sub(x).sub(x)
        y2 = m.mul(x.sub(x2)).sub(y)
        x, y = x2, y2
    return out


def _affine_periodic_tail(c: list[int]) -> Fraction:
    """Sum_{j>=0} c_j / 4^(j+1) for an eventually affine-periodic sequence.

    Detects c_{j+T} = c_j + T*a for all j >= j0 and sums the tail exactly.
    """
    J = len(c)
    for T in range(1, 13):
        for j0 in range(0, J - 3 * T):
            diffs = {c[j + T] - c[j] for j in range(j0, J - T)}
            if len(diffs) == 1:
                step = diffs.pop()
                if step % T and T > 1:
                    continue
                head = sum(Fraction(c[j], 4 ** (j + 1)) for j in range(j0))
                tail = Fraction(0)
                r = Fraction(1, 4**T)
                geo = 1 / (1 - r)
                drift = r / (1 - r) ** 2
                for i in range(T):
                    q = Fraction(1, 4 ** (j0 + i + 1))
                    tail += c[j0 + i] * q * geo + step * q * drift
                return head + tail
    raise PrecisionError("no affine-periodic pattern in valuation sequence")


def _lambda_p_exact(curve: CurveModel, p: int, pt: CurvePoint) -> Fraction:
    """Exact coefficient q with local height q * log p at the prime p."""
    for count, digits in ((40, 64), (64, 160), (96, 400)):
        try:
            c = _padic_valuation_sequence(curve, p, pt, count, digits)
            return -2 * _affine_periodic_tail(c)
        except PrecisionError:
            continue
    raise PrecisionError(f"local height at p = {p} did not stabilize")


# ---------------------------------------------------------------------------
# canonical height and derived quantities


def _torsion_order(curve: CurveModel, p: CurvePoint) -> int | None:
    q = p
    for n in range(1, 13):
        if q.is_identity:
            return n
        q = add(curve, q, p)
    return None


def canonical_height(
    curve: CurveModel, p: CurvePoint, precision_goal: float = 1e-10
) -> HeightProfile:
    """Canonical height with per-place local contributions."""
    if p.is_identity:
        raise ValueError("affine point required")
    if not on_curve(curve, p):
        raise ValueError("point not on curve")
    if not 1e-14 <= precision_goal <= 1e-2:
        raise ValueError("precision_goal out of range")
    if (n := _torsion_order(curve, p)) is not None and n > 1:
        return HeightProfile(
            weil=weil_height(p),
            canonical=0.0,
            local={},
            precision_goal=precision_goal,
            is_torsion=True,
        )
    dps = int(-mp.log10(mp.mpf(precision_goal))) + 35
    with mp.workdps(dps):
        x_real = mp.mpf(p.x.numerator) / mp.mpf(p.x.denominator)
        lam_inf = _lambda_inf(curve, x_real, mp.mpf(precision_goal))
        locals_out = {"infinity": float(lam_inf)}
        exact = {}
        total = lam_inf
        primes = set()
        import sympy

        primes.update(sympy.factorint(abs(curve.disc())).keys())
        primes.update(sympy.factorint(p.x.denominator).keys())
        for q in sorted(primes):
            coeff = _lambda_p_exact(curve, q, p)
            exact[q] = coeff
            if coeff:
                val = coeff.numerator * mp.log(q) / coeff.denominator
                locals_out[str(q)] = float(val)
                total += val
            else:
                locals_out[str(q)] = 0.0
        return HeightProfile(
            weil=weil_height(p),
            canonical=float(total),
            local=locals_out,
            precision_goal=precision_goal,
            local_exact=exact,
        )


def height_pairing(
    curve: CurveModel,
    p: CurvePoint,
    q: CurvePoint,
    precision_goal: float = 1e-10,
) -> dict:
    """Bilinear pairing (h_hat(P+Q) - h_hat(P) - h_hat(Q)) / 2 and its angle."""
    hp = canonical_height(curve, p, precision_goal).canonical
    hq = canonical_height(curve, q, precision_goal).canonical
    s = add(curve, p, q)
    hs = 0.0 if s.is_identity else canonical_height(curve, s, precision_goal).canonical
    pairing = (hs - hp - hq) / 2
    cos_angle = None
    if hp > 10 * precision_goal and hq > 10 * precision_goal:
        cos_angle = pairing / math.sqrt(hp * hq)
    return {"pairing": pairing, "cos_angle": cos_angle, "h_p": hp, "h_q": hq}


def height_gap_report(
    curve: CurveModel, p: CurvePoint, precision_goal: float = 1e-10
) -> dict:
    """Difference h_hat - h against its main-term model."""
    if p.is_identity:
        raise ValueError("affine required")
    prof = canonical_height(curve, p, precision_goal)
    h = prof.weil
    disc = abs(curve.disc())
    x_abs = abs(p.x)
    with mp.workdps(30):
        x_f = mp.mpf(x_abs.numerator) / mp.mpf(x_abs.denominator)
        model = (
            max(mp.log(x_f * mp.mpf(disc) ** (mp.mpf(-1) / 6)), 0)
            + mp.log(disc) / 6
            - max(mp.log(x_f), 0)
        )
    lhs = prof.canonical - h
    return {"lhs": lhs, "model": float(model), "residual": lhs - float(model)}


# ---------------------------------------------------------------------------
# real period


def real_period(curve: CurveModel, precision_goal: float = 1e-12) -> float:
    """omega_1 = 2 int_rho^inf dx / sqrt(x^3 + Ax + B), two ways."""
    if curve.disc() == 0:
        raise ValueError("singular cubic")
    dps = int(-mp.log10(mp.mpf(precision_goal))) + 20
    with mp.workdps(dps):
        agm_val = _period_agm(curve)
        quad_val = _period_quad(curve)
        if abs(agm_val - quad_val) > precision_goal * max(1, abs(agm_val)):
            raise PrecisionError("period routes disagree beyond goal")
        return float(agm_val)


def _roots(curve: CurveModel):
    return mp.polyroots([1, 0, curve.a, curve.b], maxsteps=200, extraprec=80)


def _period_agm(curve: CurveModel):
    roots = _roots(curve)
    reals = [r.real for r in roots if abs(r.imag) < mp.mpf(10) ** (-mp.mp.dps // 2)]
    if len(reals) == 3:
        e1, e2, e3 = sorted(reals)
        return 2 * mp.pi / mp.agm(mp.sqrt(e3 - e1), mp.sqrt(e3 - e2))
    rho = max(reals)
    cplx = [r for r in roots if abs(r.imag) >= mp.mpf(10) ** (-mp.mp.dps // 2)]
    u, v = cplx[0].real, abs(cplx[0].imag)
    big_a = mp.sqrt((rho - u) ** 2 + v * v)
    ksq = (big_a - (rho - u)) / (2 * big_a)
    k = mp.sqrt(ksq)
    kp = mp.sqrt(1 - ksq)
    K = mp.pi / (2 * mp.agm(1, kp))
    return 2 * (2 / mp.sqrt(big_a)) * K


def _period_quad(curve: CurveModel):
    roots = _roots(curve)
    reals = sorted(r.real for r in roots if abs(r.imag) < mp.mpf(10) ** (-mp.mp.dps // 2))
    rho = reals[-1]
    a, b = curve.a, curve.b
    # synthetic division: x^3 + a x + b = (x - rho)(x^2 + beta x + gamma)
    beta = rho
    gamma = rho * rho + a

    def f(t):
        x = rho + t * t
        return 2 / mp.sqrt(x * x + beta * x + gamma)

    return 2 * mp.quad(f, [0, 1, 10, mp.inf])

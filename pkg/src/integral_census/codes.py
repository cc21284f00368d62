"""Upper bounds for point sets with bounded pairwise inner products.

Four methods: a spherical-cap volume bound (with a projective variant),
the exact circle bound for lines in the plane, the Kabatiansky-Levenshtein
exponential rate, and a Delsarte-type linear-programming bound for
projective codes in small dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.optimize import linprog

__all__ = [
    "CodeBoundResult",
    "cap_bound",
    "rp1_bound",
    "kl_exponent",
    "kl_base",
    "kl_invert",
    "lp_bound",
    "best_code_bound",
]

_THETA_EDGE = 1e-6


@dataclass
class CodeBoundResult:
    r: int
    theta: float
    method: str
    bound: float
    certified: bool = True
    detail: dict | None = None


def cap_bound(r: int, theta: float, projective: bool = False) -> float:
    """Cap-packing bound 2 sqrt(3r) sin(theta/2)^(1-r) / cos(theta/2).

    The projective flag selects the halved variant
    sqrt(3r) (1/2 - J/4)^((1-r)/2) (1/2 + J/4)^(-1/2) with J = 2 cos theta.
    """
    if r < 3:
        raise ValueError("cap_bound requires r >= 3 (use rp1_bound or lp_bound)")
    if not 0 < theta < math.pi - _THETA_EDGE:
        raise ValueError("theta out of domain")
    with mp.workdps(50):
        th = mp.mpf(theta)
        if projective:
            j = 2 * mp.cos(th)
            val = (
                mp.sqrt(3 * r)
                * (mp.mpf(1) / 2 - j / 4) ** ((1 - r) / mp.mpf(2))
                * (mp.mpf(1) / 2 + j / 4) ** (mp.mpf(-1) / 2)
            )
        else:
            val = (
                2
                * mp.sqrt(3 * r)
                * mp.sin(th / 2) ** (1 - r)
                / mp.cos(th / 2)
            )
        return float(val)


def cap_gamma_ratio_gap(r: int) -> float:
    """Gamma((r-1)/2)/Gamma(r/2) - 2 sqrt(3) / sqrt(pi r); zero at r = 3."""
    with mp.workdps(60):
        lhs = mp.gamma(mp.mpf(r - 1) / 2) / mp.gamma(mp.mpf(r) / 2)
        rhs = 2 * mp.sqrt(3) / mp.sqrt(mp.pi * r)
        return float(lhs - rhs)


def rp1_bound(theta: float) -> int:
    """Max lines in the plane with pairwise angle >= theta: floor(pi/theta)."""
    if not 0 < theta <= math.pi / 2:
        raise ValueError("theta must lie in (0, pi/2]")
    return int(mp.floor(mp.pi / mp.mpf(theta)))


def kl_exponent(theta: float, dps: int = 50):
    """Per-dimension exponential rate of the sphere-code bound."""
    if not 0 < theta <= math.pi / 2:
        raise ValueError("theta must lie in (0, pi/2]")
    with mp.workdps(dps):
        st = mp.sin(mp.mpf(theta))
        a = (1 + st) / (2 * st)
        b = (1 - st) / (2 * st)
        rate = a * mp.log(a) - (b * mp.log(b) if b > 0 else mp.mpf(0))
        return rate


def kl_base(theta: float, dps: int = 50) -> float:
    return float(mp.e ** kl_exponent(theta, dps))


def kl_invert(base: float) -> dict:
    """Solve kl_base(theta) = base by bisection; rate decreases in theta."""
    if not 1 < base <= 10:
        raise ValueError("base must lie in (1, 10]")
    with mp.workdps(50):
        target = mp.log(mp.mpf(base))
        lo, hi = mp.mpf("1e-8"), mp.pi / 2
        if kl_exponent(float(hi)) > target or kl_exponent(float(lo)) < target:
            raise ValueError("no root in (0, pi/2]")
        while hi - lo > mp.mpf("1e-12"):
            mid = (lo + hi) / 2
            if kl_exponent(float(mid)) > target:
                lo = mid
            else:
                hi = mid
        theta = (lo + hi) / 2
        return {"theta": float(theta), "cos_theta": float(mp.cos(theta))}


# ---------------------------------------------------------------------------
# Delsarte-type LP bound for projective codes


def _basis_eval(r: int, degrees: list[int], t: np.ndarray) -> np.ndarray:
    """Rows: evaluation of the normalized positive-definite basis at t."""
    from scipy.special import eval_chebyt, eval_gegenbauer

    rows = []
    for k in degrees:
        if r == 2:
            vals = eval_chebyt(k, t)
            norm = 1.0
        else:
            lam = (r - 2) / 2.0
            vals = eval_gegenbauer(k, lam, t)
            norm = eval_gegenbauer(k, lam, 1.0)
        rows.append(vals / norm)
    return np.array(rows)


def lp_bound(
    r: int, theta: float, degree: int = 20, grid_size: int = 400
) -> CodeBoundResult:
    """LP bound for projective codes with |<v, w>| <= cos theta.

    Finds f = 1 + sum_k f_k G_k (even degrees, nonnegative coefficients)
    with f <= 0 on [0, cos theta]; then the code size is at most f(1).
    Certification re-checks the sign condition on a 10x finer grid.
    """
    if not 2 <= r <= 16:
        raise ValueError("lp_bound supports 2 <= r <= 16")
    if degree > 40:
        raise ValueError("degree must be <= 40")
    if grid_size < 200:
        raise ValueError("grid_size must be >= 200")
    if not 0 < theta < math.pi / 2 + _THETA_EDGE:
        raise ValueError("theta out of domain")
    ct = math.cos(theta)
    degrees = list(range(2, degree + 1, 2))
    if not degrees:
        # constant polynomial: f = 1 > 0 on the region, no valid bound beyond
        # the normalization; report the trivial value 1 certified
        return CodeBoundResult(r, theta, "lp", 1.0, True, {"degree": 0})
    t_grid = np.linspace(0.0, ct, grid_size)
    basis_grid = _basis_eval(r, degrees, t_grid)
    # variables f_k >= 0; minimize f(1) = 1 + sum f_k; constraint f(t) <= 0,
    # tightened by a small slack so the optimum stays negative between nodes
    slack = 1e-4
    c = np.ones(len(degrees))
    a_ub = basis_grid.T
    b_ub = -(1.0 + slack) * np.ones(grid_size)
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(0, None)] * len(degrees))
    if not res.success:
        return CodeBoundResult(r, theta, "lp", math.inf, False, {"status": res.message})
    coeffs = res.x
    bound = 1.0 + float(np.sum(coeffs))
    fine = np.linspace(0.0, ct, 10 * grid_size)
    f_fine = 1.0 + coeffs @ _basis_eval(r, degrees, fine)
    margin = float(np.max(f_fine))
    certified = margin <= 1e-9 and bool(np.all(coeffs >= -1e-12))
    return CodeBoundResult(
        r,
        theta,
        "lp",
        bound,
        certified,
        {"degree": degree, "grid_size": grid_size, "fine_grid_max": margin},
    )


def best_code_bound(r: int, theta: float) -> CodeBoundResult:
    """Minimum over the applicable certified methods for lines in R^r."""
    if r < 2:
        raise ValueError("r must be >= 2")
    if r == 2:
        return CodeBoundResult(2, theta, "rp1", float(rp1_bound(theta)))
    candidates = [
        CodeBoundResult(r, theta, "cap", cap_bound(r, theta, projective=True))
    ]
    if r <= 16:
        lp = lp_bound(r, theta)
        if lp.certified and math.isfinite(lp.bound):
            candidates.append(lp)
    return min(candidates, key=lambda c: c.bound)

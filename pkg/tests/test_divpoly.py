import random
from fractions import Fraction

import pytest

from integral_census import divpoly
from integral_census.divpoly import (
    denominator_of_multiple,
    multiply_point,
    psi,
    psi_value,
    triple_root_identity_check,
    verify_coeff_growth,
)
from integral_census.families import CurveModel
from integral_census.points import CurvePoint, Identity, add


def test_base_cases_match_closed_forms():
    p3 = psi(3)
    assert p3.terms == {(4, 0, 0): 3, (2, 1, 0): 6, (1, 0, 1): 12, (0, 2, 0): -1}
    assert p3.y_factor == 0
    p2 = psi(2)
    assert p2.y_factor == 1 and p2.terms == {(0, 0, 0): 2}


@pytest.mark.parametrize("n", range(1, 17))
def test_weighted_homogeneity_and_leading_coeff(n):
    poly = psi(n)
    total = Fraction(n * n - 1, 2)
    for (fx, fa, fb) in poly.terms:
        assert fx + 2 * fa + 3 * fb + Fraction(3, 2) * poly.y_factor == total
    assert poly.x_leading_coeff() == n
    # x-degree of the y-stripped part
    expected = (n * n - 1) // 2 if n % 2 else (n * n - 4) // 2
    if n > 1:
        assert poly.x_degree() == expected


@pytest.mark.parametrize("n", [17, 24, 31, 32])
def test_homogeneity_numeric_scaling(n):
    # psi_n(l^2 a, l^3 b; l x, l^(3/2) y) = l^((n^2-1)/2) psi_n(a, b; x, y);
    # l = 4 keeps the half-integer y-weight integral
    curve = CurveModel(-7, 10)
    p = CurvePoint.affine(1, 2)
    scaled_curve = CurveModel(-7 * 16, 10 * 64)
    sp = CurvePoint.affine(4, 16)
    lam = Fraction(2) ** (n * n - 1)  # 4^((n^2-1)/2)
    assert psi_value(scaled_curve, sp, n) == lam * psi_value(curve, p, n)


def test_psi_value_matches_symbolic():
    curve = CurveModel(-7, 10)
    p = CurvePoint.affine(1, 2)
    for n in range(1, 13):
        poly = psi(n)
        sym = sum(
            c * p.x**fx * Fraction(curve.a) ** fa * Fraction(curve.b) ** fb
            for (fx, fa, fb), c in poly.terms.items()
        ) * p.y**poly.y_factor
        assert psi_value(curve, p, n) == sym


def test_multiply_point_equals_iterated_addition():
    rng = random.Random(7)
    done = 0
    while done < 30:
        x, y, a = rng.randint(-9, 9), rng.randint(1, 9), rng.randint(-9, 9)
        b = y * y - x**3 - a * x
        curve = CurveModel(a, b)
        if curve.disc() == 0:
            continue
        done += 1
        p = CurvePoint.affine(x, y)
        acc = p
        for n in range(2, 9):
            acc = add(curve, acc, p)
            assert multiply_point(curve, p, n) == acc


def test_multiply_point_torsion():
    # (2, 3) on y^2 = x^3 + 1 has order 6
    curve = CurveModel(0, 1)
    p = CurvePoint.affine(2, 3)
    assert multiply_point(curve, p, 2) == CurvePoint.affine(0, 1)
    assert multiply_point(curve, p, 3) == CurvePoint.affine(-1, 0)
    assert multiply_point(curve, p, 6) == Identity
    assert psi_value(curve, p, 6) == 0
    assert psi_value(curve, p, 5) != 0
    assert denominator_of_multiple(curve, p, 6) is None
    # 2-torsion short-circuit
    t = CurvePoint.affine(-1, 0)
    assert multiply_point(curve, t, 2) == Identity
    assert multiply_point(curve, t, 3) == t


def test_denominator_of_multiple_grows():
    curve = CurveModel(0, -2)
    p = CurvePoint.affine(3, 5)
    dens = [denominator_of_multiple(curve, p, n) for n in (1, 2, 3, 4)]
    assert dens[0] == 1
    assert dens[1] < dens[2] < dens[3]


def test_coeff_growth_envelope():
    res = verify_coeff_growth(16, 1e10, 1.0, 1e6)
    assert res["all_within"]
    assert res["worst_ratio"] <= 1.0
    # constants too small to hold get caught
    bad = verify_coeff_growth(16, 1.01, 0.0, 1.01)
    assert not bad["all_within"]
    with pytest.raises(ValueError):
        verify_coeff_growth(8, 0.5, 1.0, 2.0)


def test_triple_root_identity():
    curve = CurveModel(1, 6)
    assert triple_root_identity_check(curve, CurvePoint.affine(3, 6), 50)
    curve2 = CurveModel(-7, 10)
    assert triple_root_identity_check(curve2, CurvePoint.affine(1, 2), 50)


def test_psi_cache_roundtrip(tmp_path, monkeypatch):
    monkeypatch.setenv(divpoly.CACHE_ENV, str(tmp_path))
    fresh = dict(divpoly._psi_cache)
    divpoly._psi_cache.clear()
    try:
        a = psi(9)
        assert (tmp_path / "psi_9.pkl").exists()
        divpoly._psi_cache.clear()
        b = psi(9)  # loaded from disk
        assert a == b
    finally:
        divpoly._psi_cache.clear()
        divpoly._psi_cache.update(fresh)


def test_psi_bounds():
    with pytest.raises(ValueError):
        psi(0)
    with pytest.raises(ValueError):
        psi(100, n_max=64)
    with pytest.raises(ValueError):
        multiply_point(CurveModel(0, 1), CurvePoint.affine(2, 3), 100)

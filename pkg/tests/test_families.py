import math

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from integral_census.families import (
    CurveModel,
    Family,
    discriminant,
    enumerate_family,
    filter_diagnostics,
    is_family_member,
    naive_height,
    squarefull_part,
)


def test_discriminant_values():
    assert discriminant(0, -2) == -16 * 27 * 4
    assert discriminant(-1, 0) == 64
    # singular: y^2 = x^3 - 3x + 2 has a double root at x = 1
    assert discriminant(-3, 2) == 0


def test_naive_height_matches_definition():
    assert float(naive_height(0, 1)) == pytest.approx(27 ** (1 / 6), rel=1e-12)
    assert float(naive_height(-2, 0)) == pytest.approx(32 ** (1 / 6), rel=1e-12)
    # the larger of the two terms wins
    assert float(naive_height(10, 1)) == pytest.approx(4000 ** (1 / 6), rel=1e-12)


def test_squarefull_part_known_values():
    assert squarefull_part(12) == 4
    assert squarefull_part(-12) == 4
    assert squarefull_part(360) == 72  # 2^3 * 3^2
    assert squarefull_part(30) == 1
    assert squarefull_part(1) == 1
    with pytest.raises(ValueError):
        squarefull_part(0)


@given(st.integers(min_value=1, max_value=10**6))
@settings(max_examples=200, deadline=None)
def test_squarefull_part_divides_and_is_squarefull(n):
    s = squarefull_part(n)
    assert n % s == 0
    for p, e in sympy.factorint(s).items():
        assert e >= 2
    # the cofactor is squarefree
    assert all(e == 1 for e in sympy.factorint(n // s).values())


def test_family_membership_examples():
    assert is_family_member(CurveModel(0, 2), Family.MORDELL)
    assert not is_family_member(CurveModel(0, 64), Family.MORDELL)
    assert is_family_member(CurveModel(2, 0), Family.B0)
    assert not is_family_member(CurveModel(16, 0), Family.B0)
    assert is_family_member(CurveModel(-25, 0), Family.CONGRUENT)
    assert not is_family_member(CurveModel(-16, 0), Family.CONGRUENT)  # D = 4
    assert not is_family_member(CurveModel(-3, 0), Family.CONGRUENT)  # not D^2
    # quasiminimality: 2^4 | a together with 2^6 | b is excluded
    assert not is_family_member(CurveModel(16, 64), Family.UNIVERSAL)
    assert is_family_member(CurveModel(16, 32), Family.UNIVERSAL)
    # singular members are excluded everywhere
    assert not is_family_member(CurveModel(0, 0), Family.MORDELL)
    assert not is_family_member(CurveModel(-3, 2), Family.UNIVERSAL)


def _brute_force_count(family: Family, T: float) -> int:
    bound = int(T**3) + 2
    count = 0
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            c = CurveModel(a, b)
            if naive_height(a, b) <= T and is_family_member(c, family):
                count += 1
    return count


@pytest.mark.parametrize("family", list(Family))
@pytest.mark.parametrize("T", [1.5, 2, 3])
def test_enumerate_matches_brute_force_small(family, T):
    got = sum(1 for _ in enumerate_family(family, T))
    assert got == _brute_force_count(family, T)


def test_enumeration_is_sorted_and_in_range():
    curves = list(enumerate_family(Family.UNIVERSAL, 3))
    assert curves == sorted(curves)
    assert all(naive_height(c.a, c.b) <= 3 for c in curves)
    assert all(c.disc() != 0 for c in curves)


def test_enumerate_rejects_bad_T():
    with pytest.raises(ValueError):
        list(enumerate_family(Family.MORDELL, 0.5))


def test_filter_diagnostics_flags():
    # tiny curve at larger T fails every size flag; cap the point scan so
    # the small-point checks stay cheap
    d = filter_diagnostics(CurveModel(1, 2), 20, 0.1, x_bound_cap=100)
    assert not d.passes_size
    # the flags measure what they claim: |a| large enough passes flag 0
    big = int(20 ** (2 - 0.1)) + 1
    d2 = filter_diagnostics(CurveModel(big, 2), 20, 0.1, x_bound_cap=10)
    assert d2.condition_flags[0]
    with pytest.raises(ValueError):
        filter_diagnostics(CurveModel(1, 2), 20, 1.5)


def test_filter_lazy_agrees_on_pass_verdict():
    for c in [CurveModel(1, 2), CurveModel(-7, 13), CurveModel(50, -90)]:
        full = filter_diagnostics(c, 8, 0.2, x_bound_cap=100)
        lazy = filter_diagnostics(c, 8, 0.2, x_bound_cap=100, lazy=True)
        # lazy only short-circuits when a cheap flag already failed, so the
        # overall verdict is identical
        assert full.passes_all == lazy.passes_all

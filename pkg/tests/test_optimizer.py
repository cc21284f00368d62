import math
from fractions import Fraction

import numpy as np
import pytest

from integral_census.optimizer import (
    REFERENCE_PARAMS,
    REPORTED_COMPARISON_BOUND,
    BoundReport,
    OptimizerParams,
    RankModel,
    aggregate_bound,
    check_constraints,
    d_tilde,
    kappa,
    optimize,
    per_rank_bound,
    verify_basis_inequality,
)


def test_d_tilde_frozen_value():
    # fixed point of x -> D + 1/x, evaluated at 50 digits
    dt = float(d_tilde(612.117))
    assert dt == pytest.approx(612.1186336702479, abs=1e-10)
    assert dt == pytest.approx(612.117 + 1 / dt, abs=1e-12)
    with pytest.raises(ValueError):
        d_tilde(0.5)


def test_kappa_frozen_value():
    params = REFERENCE_PARAMS
    k = float(kappa(params.C(), params.D))
    assert k == pytest.approx(4.4844422487910505, abs=1e-10)
    assert 4 < k < 4.5


def test_reference_constraints_hold():
    verdict = check_constraints(REFERENCE_PARAMS)
    assert verdict["iv_empty"]
    assert verdict["roth_count"]
    # the second inequality holds by a hair; freeze the 50-digit margin
    assert verdict["roth_margin"] == pytest.approx(2.6251428528916465e-08, rel=1e-4)


def test_infeasible_parameters_detected():
    verdict = check_constraints(OptimizerParams(c=0.998114, D=5.0, s=3))
    assert not (verdict["iv_empty"] and verdict["roth_count"])


def test_per_rank_values():
    assert per_rank_bound(0, REFERENCE_PARAMS) == 0.0
    assert per_rank_bound(1, REFERENCE_PARAMS) == 2.0
    b2 = per_rank_bound(2, REFERENCE_PARAMS)
    # r = 2: 2 * 2 * ceil(log dtilde / log 1.2) * rp1(acos(0.6)) + 27 * (9 - 1)
    shells = math.ceil(math.log(612.1186336702479) / math.log(1.2))
    assert b2 == 4 * shells * 3 + 27 * 8
    assert per_rank_bound(3, REFERENCE_PARAMS) > b2
    with pytest.raises(ValueError):
        per_rank_bound(2, OptimizerParams(c=0.998114, D=5.0, s=3))


def test_minimalist_aggregate_exact():
    report = aggregate_bound(RankModel.minimalist())
    assert report.aggregate_exact == Fraction(8, 9)
    assert abs(report.aggregate - 8 / 9) < 1e-12


def test_moments_aggregate_frozen():
    report = aggregate_bound(RankModel.moments())
    assert math.isfinite(report.aggregate)
    assert report.aggregate < 100
    assert report.aggregate == pytest.approx(95.91844324770639, rel=1e-6)
    assert report.tail_bound > 0
    assert report.comparison == REPORTED_COMPARISON_BOUND


def test_moments_infeasible_floors_raise():
    model = RankModel.moments()
    model.floors = {"rank0": 0.9, "rank1": 0.9}
    with pytest.raises(ValueError):
        aggregate_bound(model)


def test_optimize_dominates_reference():
    model = RankModel.moments()
    reference = aggregate_bound(model, REFERENCE_PARAMS)
    best = optimize(model)
    assert best.aggregate <= reference.aggregate + 1e-9
    assert math.isfinite(best.aggregate)
    verdict = check_constraints(best.params)
    assert verdict["iv_empty"] and verdict["roth_count"]


def test_optimize_rejects_empty_grid():
    with pytest.raises(ValueError):
        optimize(RankModel.moments(), {"c": [0.5], "D": [2.0], "s": [3], "J": [1.2]})


def test_appendix_c_variant_changes_constant():
    base = OptimizerParams(c=0.998114, D=612.117, s=3)
    var = OptimizerParams(c=0.998114, D=612.117, s=3, appendix_c_variant=True)
    assert var.C() == pytest.approx(base.C() / float(d_tilde(612.117)), rel=1e-12)


def _admissible_gram(rng, k):
    # random Gram matrix massaged into the admissible class: sort the
    # diagonal, then shrink off-diagonals toward a diagonal matrix (a
    # convex combination of PSD matrices stays PSD, diagonal unchanged)
    m = rng.normal(size=(k, 10))
    g = m @ m.T
    order = np.argsort(np.diag(g))
    g = g[np.ix_(order, order)]
    diag = np.diag(g).copy()
    t = 1.0
    for i in range(k):
        for j in range(i + 1, k):
            if g[i, j] != 0:
                t = min(t, 0.45 * diag[i] / abs(g[i, j]))
    return (1 - t) * np.diag(diag) + t * g


def test_verify_basis_inequality_random_gram():
    rng = np.random.default_rng(5)
    for _ in range(25):
        k = int(rng.integers(2, 7))
        gram = _admissible_gram(rng, k)
        signs = rng.choice([-1.0, 1.0], size=k)
        assert verify_basis_inequality(gram, signs)


def test_verify_basis_inequality_preconditions():
    with pytest.raises(ValueError):
        verify_basis_inequality(np.array([[2.0, 0.0], [0.0, 1.0]]), [1, 1])
    with pytest.raises(ValueError):
        verify_basis_inequality(np.array([[1.0, 0.9], [0.9, 1.0]]), [1, 1])
    with pytest.raises(ValueError):
        verify_basis_inequality(np.eye(2), [1, 2])

import json
import math

import numpy as np
import pytest
from scipy import stats

from binjl.harness.io import DatasetMatrix
from binjl.harness.verify import (
    error_curve,
    inner_product_errors,
    verify_distance_embedding,
    verify_inner_product_embedding,
)
from binjl.rng import derive_seed


def unit_rows(rng, count, dim):
    X = rng.standard_normal((count, dim))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def test_single_point_distance_campaign():
    rep = verify_distance_embedding(np.ones((1, 3)), 0.1, 2.0, 64, 3)
    assert rep.sup_error == 0.0 and rep.failure_fraction == 0.0


def test_two_point_distance_campaign():
    # error ~ N(-0.001, 0.008): 0.05 is more than 6 standard deviations out
    data = np.array([[0.0], [1.0]])
    rep = verify_distance_embedding(data, 0.05, 3.0, 100_000, 10, master_seed=1)
    assert sum(e <= 0.05 for e in rep.per_seed_sup) >= 9
    assert rep.sup_error >= rep.mean_error >= 0
    assert 0 <= rep.failure_fraction <= 1
    assert rep.seeds == [derive_seed(1, k) for k in range(10)]


def test_variance_halves_when_m_doubles():
    data = np.array([[0.0], [1.0]])
    ms = [1000, 2000, 4000, 8000]
    var = [np.var(verify_distance_embedding(data, 1.0, 3.0, m, 200, 5).per_seed_sup, ddof=1) for m in ms]
    slope = np.polyfit(np.log(ms), np.log(var), 1)[0]
    assert -1.3 <= slope <= -0.7


def test_failure_fraction_recomputes(rng):
    rep = verify_distance_embedding(unit_rows(rng, 5, 4), 0.2, 2.0, 300, 8, 3)
    assert rep.failure_fraction == sum(e > 0.2 for e in rep.per_seed_sup) / 8
    assert rep.sup_error == max(rep.per_seed_sup)


def test_campaign_parameter_checks():
    with pytest.raises(ValueError):
        verify_distance_embedding(np.ones((2, 2)), 0.1, 0.0, 10, 1)
    with pytest.raises(ValueError):
        verify_distance_embedding(np.ones((2, 2)), 0.1, 1.0, 0, 1)
    with pytest.raises(ValueError):
        verify_inner_product_embedding(np.ones((2, 2)), 0.1, 1.0, 1, 0)


def test_single_point_at_origin_completes():
    rep = verify_inner_product_embedding(np.zeros((1, 4)), 0.1, 1.0, 4, 3)
    assert len(rep.per_seed_sup) == 3
    assert rep.sq_sup_error == 0.0


def test_orthonormal_pair_gaussian():
    data = np.eye(2)
    rep = verify_inner_product_embedding(data, 0.05, 2.0, 1 << 14, 10, 2, kind="gaussian")
    assert sum(e <= 0.05 for e in rep.per_seed_sup) >= 9


def test_orthonormal_pair_circulant():
    data = np.zeros((2, 1 << 14))
    data[0, 0] = data[1, 1] = 1.0
    rep = verify_inner_product_embedding(data, 0.05, 2.0, 1 << 14, 10, 2)
    assert sum(e <= 0.05 for e in rep.per_seed_sup) >= 9
    assert rep.manifest["n_pad"] == 1 << 14


def test_circulant_and_gaussian_comparable(rng):
    X = unit_rows(rng, 6, 256)
    circ = verify_inner_product_embedding(X, 0.1, 2.0, 128, 40, 0).per_seed_sup
    dense = verify_inner_product_embedding(X, 0.1, 2.0, 128, 40, 100, kind="gaussian").per_seed_sup
    assert stats.mannwhitneyu(circ, dense).pvalue > 0.01


def test_inner_product_error_pairs(rng):
    data = DatasetMatrix(unit_rows(rng, 4, 16))
    ip, sq = inner_product_errors(data, 1.5, 16, 0)
    assert ip.shape == (10,) and sq.shape == (6,)
    with pytest.raises(ValueError):
        inner_product_errors(data, 1.5, 16, 0, kind="hadamard")


def test_workers_do_not_change_results(rng):
    X = unit_rows(rng, 5, 32)
    a = verify_inner_product_embedding(X, 0.1, 2.0, 32, 6, 4)
    b = verify_inner_product_embedding(X, 0.1, 2.0, 32, 6, 4, workers=3)
    assert a.to_dict(False) == b.to_dict(False)


def test_report_json_deterministic(rng):
    X = unit_rows(rng, 4, 8)
    a = verify_distance_embedding(X, 0.1, 2.0, 100, 4, 9).to_json(include_wall_times=False)
    b = verify_distance_embedding(X, 0.1, 2.0, 100, 4, 9).to_json(include_wall_times=False)
    assert a == b
    assert "wall_times" not in json.loads(a)


def test_error_curve_table(rng):
    X = unit_rows(rng, 6, 8)
    res = error_curve(X, 3.0, [256, 1024, 4096], 6, 1)
    assert [r["m"] for r in res["rows"]] == [256, 1024, 4096]
    assert res["degenerate"] is False and res["slope"] < 0
    assert res == error_curve(X, 3.0, [256, 1024, 4096], 6, 1)


def test_error_curve_degenerate():
    res = error_curve(np.ones((1, 3)), 2.0, [16, 32], 2)
    assert res["degenerate"] is True and res["slope"] is None
    assert all(r["median_sup_error"] == 0 for r in res["rows"])


def test_error_curve_arguments():
    with pytest.raises(ValueError):
        error_curve(np.eye(2), 1.0, [16], 2)
    with pytest.raises(ValueError):
        error_curve(np.eye(2), 1.0, [32, 16], 2)


def test_derived_seeds_are_distinct():
    seeds = [derive_seed(0, k) for k in range(1000)]
    assert len(set(seeds)) == 1000
    assert all(0 <= s < 2**63 for s in seeds)
    assert math.isclose(derive_seed(5, 3), derive_seed(5, 3))

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binjl import kernels
from binjl.bitcode import DualCode, complement, pack, unpack
from binjl.estimators import (
    SQRT_2PI,
    EstimatorParams,
    bilinear_matrix,
    clamp,
    distance_matrix,
    estimate_distance,
    estimate_inner_product,
    estimate_sq_distance,
    expected_distance_given_rows,
    expected_inner_product_given_rows,
    expected_product,
    expected_sq_distance_given_rows,
    sm_bilinear,
    sq_distance_matrix,
)
from binjl.gaussian_sketch import sample_gaussian_sketcher
from conftest import random_signs
from mc import distance_draws, pairing_draws


def random_dual(rng, m):
    return DualCode(pack(random_signs(rng, m)), pack(random_signs(rng, m)))


def s_matrix(m):
    z, i = np.zeros((m, m)), np.eye(m)
    return np.block([[z, i], [i, z]])


def stacked(u):
    return np.concatenate([unpack(u.first), unpack(u.second)]).astype(np.float64)


def test_distance_examples(rng):
    p = EstimatorParams(2.0, 100)
    c = pack(random_signs(rng, 100))
    assert estimate_distance(c, c, p) == 0.0
    assert estimate_distance(c, complement(c), p) == pytest.approx(SQRT_2PI * 2.0)
    signs = np.ones(100, dtype=int)
    flipped = signs.copy()
    flipped[:25] = -1
    assert estimate_distance(pack(signs), pack(flipped), p) == pytest.approx(1.2533141373155001, rel=1e-12)


def test_params_validation(rng):
    with pytest.raises(ValueError):
        EstimatorParams(0.0, 10)
    with pytest.raises(ValueError):
        EstimatorParams(1.0, 0)
    c = pack(random_signs(rng, 10))
    with pytest.raises(ValueError):
        estimate_distance(c, c, EstimatorParams(1.0, 11))
    u = random_dual(rng, 10)
    with pytest.raises(ValueError):
        estimate_inner_product(u, u, EstimatorParams(1.0, 12))
    with pytest.raises(ValueError):
        sm_bilinear(u, random_dual(rng, 11))


def test_pairing_extremes(rng):
    c = pack(random_signs(rng, 50))
    u = DualCode(c, c)
    assert sm_bilinear(u, u) == 100
    v = random_dual(rng, 50)
    w = DualCode(complement(v.second), complement(v.first))
    assert sm_bilinear(w, v) == -100


def test_pairing_matches_block_matrix(rng):
    S = s_matrix(129)
    for _ in range(20):
        u, v = random_dual(rng, 129), random_dual(rng, 129)
        assert sm_bilinear(u, v) == int(stacked(u) @ S @ stacked(v))


def test_inner_product_self_and_symmetry(rng):
    p = EstimatorParams(1.5, 40)
    c = pack(random_signs(rng, 40))
    assert estimate_inner_product(DualCode(c, c), DualCode(c, c), p) == pytest.approx(1.5**2)
    for _ in range(20):
        u, v = random_dual(rng, 40), random_dual(rng, 40)
        assert estimate_inner_product(u, v, p) == estimate_inner_product(v, u, p)
        assert estimate_sq_distance(u, v, p) == estimate_sq_distance(v, u, p)
        assert estimate_sq_distance(u, u, p) == 0.0


def test_sq_distance_explicit_vectors(rng):
    m, lam = 129, 2.0
    p, S = EstimatorParams(lam, m), s_matrix(m)
    for _ in range(10):
        u, v = random_dual(rng, m), random_dual(rng, m)
        d = stacked(u) - stacked(v)
        assert estimate_sq_distance(u, v, p) == pytest.approx(lam**2 / (2 * m) * (d @ S @ d), abs=1e-12)
        # same thing as lam^2/m <f(x) - f(y), f'(x) - f'(y)>
        alt = lam**2 / m * np.dot(unpack(u.first) - unpack(v.first), unpack(u.second) - unpack(v.second))
        assert estimate_sq_distance(u, v, p) == pytest.approx(alt, abs=1e-12)


def test_polarisation_identity(rng):
    p = EstimatorParams(3.0, 70)
    for _ in range(30):
        u, v = random_dual(rng, 70), random_dual(rng, 70)
        expected = estimate_inner_product(u, u, p) + estimate_inner_product(v, v, p) - 2 * estimate_inner_product(u, v, p)
        assert estimate_sq_distance(u, v, p) == pytest.approx(expected, rel=1e-14, abs=1e-14)


dual_pairs = st.integers(1, 200).flatmap(
    lambda m: st.tuples(*[st.lists(st.sampled_from([-1, 1]), min_size=m, max_size=m) for _ in range(4)])
)


@settings(max_examples=200, deadline=None)
@given(dual_pairs, st.floats(0.1, 10.0))
def test_ranges(signs, lam):
    a, b, c, d = (pack(s) for s in signs)
    m = a.length
    p = EstimatorParams(lam, m)
    u, v = DualCode(a, b), DualCode(c, d)
    assert 0 <= estimate_distance(a, c, p) <= SQRT_2PI * lam + 1e-12
    assert -(lam**2) - 1e-12 <= estimate_inner_product(u, v, p) <= lam**2 + 1e-12
    sq = estimate_sq_distance(u, v, p)
    # the polarised form is indefinite: bounded by 4 lam^2 in absolute value
    assert -4 * lam**2 - 1e-12 <= sq <= 4 * lam**2 + 1e-12


def test_sq_distance_can_be_negative():
    # first branches agree while second branches disagree in sign pattern
    a = pack([1, 1])
    b = pack([-1, -1])
    u, v = DualCode(a, a), DualCode(b, a)
    assert estimate_sq_distance(u, v, EstimatorParams(1.0, 2)) == 0.0
    u, v = DualCode(a, b), DualCode(b, a)
    assert estimate_sq_distance(u, v, EstimatorParams(1.0, 2)) < 0


def test_expected_product_cases(rng):
    lam = 1.3
    a, b = rng.uniform(-lam, lam, (2, 10_000))
    for x, y in zip(a, b):
        assert expected_product(x, y, lam) == pytest.approx(x * y, rel=1e-15)
    assert expected_product(2 * lam, lam / 2, lam) == pytest.approx(lam**2 / 2)
    assert expected_product(-5.0, -5.0, 1.0) == 1.0
    with pytest.raises(ValueError):
        expected_product(0.1, 0.1, 0.0)


def test_expected_product_monte_carlo():
    a, b, lam, n = 0.3, -0.7, 1.0, 1_000_000
    gen = np.random.default_rng(5)
    prod = np.sign(a + gen.uniform(-lam, lam, n)) * np.sign(b + gen.uniform(-lam, lam, n))
    se = prod.std(ddof=1) / math.sqrt(n)
    assert expected_product(a, b, lam) == pytest.approx(-0.21)
    assert abs(lam**2 * prod.mean() - (-0.21)) <= 4 * se


def test_clamp():
    np.testing.assert_array_equal(clamp(np.array([-3.0, -1.0, 0.5, 9.0]), 2.0), [-2.0, -1.0, 0.5, 2.0])


def test_conditional_distance_examples(rng):
    ax = rng.uniform(-1, 1, 50)
    assert expected_distance_given_rows(ax, ax, 1.0) == 0.0
    ay = rng.uniform(-1, 1, 50)
    expected = SQRT_2PI / (2 * 50) * np.abs(ax - ay).sum()
    assert expected_distance_given_rows(ax, ay, 1.0) == pytest.approx(expected, rel=1e-13)
    with pytest.raises(ValueError):
        expected_distance_given_rows(ax, ay[:-1], 1.0)


def test_conditional_distance_monte_carlo(rng):
    sk = sample_gaussian_sketcher(21, 48, 6, 1.2)
    x, y = rng.uniform(-0.4, 0.4, (2, 6))
    ax, ay = sk.project(x), sk.project(y)
    draws = distance_draws(ax, ay, 1.2, 50_000, seed=3)
    se = draws.std(ddof=1) / math.sqrt(draws.size)
    assert abs(draws.mean() - expected_distance_given_rows(ax, ay, 1.2)) <= 4 * se


def test_conditional_inner_product_monte_carlo(rng):
    sk = sample_gaussian_sketcher(22, 40, 5, 1.0)
    x, y = rng.uniform(-0.5, 0.5, (2, 5))
    ax, ay = sk.project(x), sk.project(y)
    ip, _ = pairing_draws(ax, ay, 1.0, 50_000, seed=4)
    se = ip.std(ddof=1) / math.sqrt(ip.size)
    expected = np.mean([expected_product(a, b, 1.0) for a, b in zip(ax, ay)])
    assert expected_inner_product_given_rows(ax, ay, 1.0) == pytest.approx(expected, rel=1e-13)
    assert abs(ip.mean() - expected) <= 4 * se


def test_conditional_sq_distance_antipodal():
    sk = sample_gaussian_sketcher(23, 32, 4, 3.0)
    x = np.array([0.3, -0.2, 0.1, 0.25])
    ax = sk.project(x)
    assert np.all(np.abs(ax) <= 3.0)
    expected = np.mean((2 * ax) ** 2)
    assert expected_sq_distance_given_rows(ax, -ax, 3.0) == pytest.approx(expected, rel=1e-13)
    _, sq = pairing_draws(ax, -ax, 3.0, 50_000, seed=6)
    se = sq.std(ddof=1) / math.sqrt(sq.size)
    assert abs(sq.mean() - expected) <= 4 * se


def test_scalar_and_batch_forms_agree(rng):
    m, lam = 90, 1.7
    codes = [random_dual(rng, m) for _ in range(6)]
    p = EstimatorParams(lam, m)
    w1 = np.stack([c.first.words for c in codes])
    w2 = np.stack([c.second.words for c in codes])
    bil = bilinear_matrix(kernels.hamming_cross(w1, w2), m)
    dist = distance_matrix(kernels.hamming_cross(w1, w1), p)
    sq = sq_distance_matrix(bil, p)
    for i in range(6):
        for j in range(6):
            assert bil[i, j] == sm_bilinear(codes[i], codes[j])
            assert dist[i, j] == estimate_distance(codes[i].first, codes[j].first, p)
            assert sq[i, j] == pytest.approx(estimate_sq_distance(codes[i], codes[j], p), abs=1e-12)

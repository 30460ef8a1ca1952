"""The numba and numpy kernel variants must agree bit for bit."""

import numpy as np
import pytest

from binjl import kernels
from binjl._jit import NUMBA_AVAILABLE

needs_numba = pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba disabled or missing")


def random_words(rng, count, m):
    bits = rng.random((count, m)) < 0.5
    return kernels.pack_bits_numpy(bits), bits


@pytest.mark.parametrize("m", [1, 63, 64, 65, 1000])
def test_pack_unpack_inverse(rng, m):
    words, bits = random_words(rng, 7, m)
    np.testing.assert_array_equal(kernels.unpack_bits(words, m), bits)


@needs_numba
@pytest.mark.parametrize("m", [1, 64, 129, 4097])
def test_hamming_variants_agree(rng, m):
    a, _ = random_words(rng, 13, m)
    b, _ = random_words(rng, 9, m)
    cross_np = kernels.hamming_cross_numpy(a, b)
    np.testing.assert_array_equal(kernels.hamming_cross_numba(a, b), cross_np)
    np.testing.assert_array_equal(kernels.hamming_rows_numba(a[:9], b), kernels.hamming_rows_numpy(a[:9], b))
    assert kernels.hamming_pair_numba(a[0], b[0]) == kernels.hamming_pair_numpy(a[0], b[0]) == cross_np[0, 0]


def test_hamming_cross_matches_bool_reference(rng):
    a, abits = random_words(rng, 5, 300)
    b, bbits = random_words(rng, 4, 300)
    ref = (abits[:, None, :] != bbits[None, :, :]).sum(axis=2)
    np.testing.assert_array_equal(kernels.hamming_cross(a, b), ref)


@needs_numba
@pytest.mark.parametrize("neg", [False, True])
def test_quantize_pack_variants_agree(rng, neg):
    values = rng.standard_normal((6, 130))
    values[0, :5] = 0.0
    dither = rng.uniform(-1, 1, 130)
    dither[:5] = 0.0
    np.testing.assert_array_equal(
        kernels.quantize_pack_numba(values, dither, neg), kernels.quantize_pack_numpy(values, dither, neg)
    )


def test_quantize_pack_sign_zero_convention():
    values = np.zeros(3)
    dither = np.zeros(3)
    assert int(kernels.quantize_pack(values, dither, False)[0]) == 0
    assert int(kernels.quantize_pack(values, dither, True)[0]) == 0b111

"""Hot integer kernels on packed sign words.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy version.
The public names dispatch on :data:`binjl._jit.USE_NUMBA`; both variants stay
importable under ``*_numba`` / ``*_numpy`` so tests and the benchmark can pin
one explicitly.

Word layout: uint64, little-endian bit indexing, bit set <=> sign is -1.
"""

from __future__ import annotations

import numpy as np

from binjl._jit import USE_NUMBA, njit, prange

WORD_BITS = 64

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_S1 = np.uint64(1)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S56 = np.uint64(56)


def n_words(m: int) -> int:
    return (m + WORD_BITS - 1) // WORD_BITS


@njit(cache=True, inline="always")
def popcount64(v):
    v = v - ((v >> _S1) & _M1)
    v = (v & _M2) + ((v >> _S2) & _M2)
    v = (v + (v >> _S4)) & _M4
    return (v * _H01) >> _S56


@njit(cache=True)
def hamming_pair_numba(a, b):
    total = 0
    for k in range(a.shape[0]):
        total += popcount64(a[k] ^ b[k])
    return total


@njit(cache=True)
def hamming_rows_numba(a, b):
    n = a.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        total = 0
        for k in range(a.shape[1]):
            total += popcount64(a[i, k] ^ b[i, k])
        out[i] = total
    return out


@njit(cache=True, parallel=True)
def hamming_cross_numba(a, b):
    na = a.shape[0]
    nb = b.shape[0]
    nw = a.shape[1]
    out = np.empty((na, nb), dtype=np.int64)
    for i in prange(na):
        for j in range(nb):
            total = 0
            for k in range(nw):
                total += popcount64(a[i, k] ^ b[j, k])
            out[i, j] = total
    return out


@njit(cache=True)
def quantize_pack_numba(values, dither, sign_zero_negative):
    # values: (count, m) float64; dither: (m,) float64
    count, m = values.shape
    nw = (m + 63) // 64
    out = np.empty((count, nw), dtype=np.uint64)
    for i in range(count):
        for w in range(nw):
            start = w * 64
            stop = min(start + 64, m)
            word = np.uint64(0)
            # one word per register, branch-free
            for j in range(start, stop):
                t = values[i, j] + dither[j]
                neg = (t < 0.0) | (sign_zero_negative & (t == 0.0))
                word |= np.uint64(neg) << np.uint64(j - start)
            out[i, w] = word
    return out


def hamming_pair_numpy(a: np.ndarray, b: np.ndarray) -> int:
    return int(np.bitwise_count(a ^ b).sum(dtype=np.int64))


def hamming_rows_numpy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a ^ b).sum(axis=1, dtype=np.int64)


def hamming_cross_numpy(a: np.ndarray, b: np.ndarray, block: int = 256) -> np.ndarray:
    out = np.empty((a.shape[0], b.shape[0]), dtype=np.int64)
    for start in range(0, a.shape[0], block):
        chunk = a[start : start + block, None, :] ^ b[None, :, :]
        out[start : start + block] = np.bitwise_count(chunk).sum(axis=2, dtype=np.int64)
    return out


def pack_bits_numpy(bits: np.ndarray) -> np.ndarray:
    """Pack a boolean ``(count, m)`` array (True = -1) into uint64 words."""
    bits = np.asarray(bits, dtype=bool)
    count, m = bits.shape
    nw = n_words(m)
    packed = np.packbits(bits, axis=1, bitorder="little")
    padded = np.zeros((count, nw * 8), dtype=np.uint8)
    padded[:, : packed.shape[1]] = packed
    return padded.view("<u8").astype(np.uint64, copy=False).reshape(count, nw)


def quantize_pack_numpy(values: np.ndarray, dither: np.ndarray, sign_zero_negative: bool) -> np.ndarray:
    t = values + dither
    bits = t <= 0.0 if sign_zero_negative else t < 0.0
    return pack_bits_numpy(bits)


def unpack_bits(words: np.ndarray, m: int) -> np.ndarray:
    """Inverse of :func:`pack_bits_numpy`; returns a boolean ``(count, m)`` array."""
    words = np.ascontiguousarray(words, dtype=np.uint64)
    as_bytes = words.astype("<u8", copy=False).view(np.uint8).reshape(words.shape[0], -1)
    return np.unpackbits(as_bytes, axis=1, count=m, bitorder="little").astype(bool)


def _contig(words: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(words, dtype=np.uint64)


if USE_NUMBA:
    _pair, _rows, _cross, _qpack = hamming_pair_numba, hamming_rows_numba, hamming_cross_numba, quantize_pack_numba
else:
    _pair, _rows, _cross, _qpack = hamming_pair_numpy, hamming_rows_numpy, hamming_cross_numpy, quantize_pack_numpy


def hamming_pair(a: np.ndarray, b: np.ndarray) -> int:
    """Hamming distance between two packed word vectors."""
    return int(_pair(_contig(a), _contig(b)))


def hamming_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise Hamming distances between two ``(count, words)`` arrays."""
    return _rows(_contig(a), _contig(b))


def hamming_cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All-pairs Hamming distance matrix, shape ``(len(a), len(b))``."""
    return _cross(_contig(a), _contig(b))


def quantize_pack(values: np.ndarray, dither: np.ndarray, sign_zero_negative: bool = False) -> np.ndarray:
    """Fused ``sign(values + dither)`` and packing.

    ``values`` is ``(m,)`` or ``(count, m)``; the result has matching leading
    shape with ``n_words(m)`` uint64 words in the last axis.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    dither = np.ascontiguousarray(dither, dtype=np.float64)
    if values.ndim == 1:
        return _qpack(values[None, :], dither, bool(sign_zero_negative))[0]
    return _qpack(values, dither, bool(sign_zero_negative))

"""Packed +-1 codes and the two integer kernels every estimator reduces to."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from binjl import kernels
from binjl.kernels import WORD_BITS, n_words


def _readonly(words: np.ndarray) -> np.ndarray:
    words = np.array(words, dtype=np.uint64, copy=True)
    words.flags.writeable = False
    return words


@dataclass(frozen=True, eq=False)
class BinaryCode:
    """``length`` signs stored one bit each; bit set means -1.

    Bit ``j`` of word ``w`` holds sign index ``w * 64 + j``. Bits past
    ``length`` are always zero.
    """

    length: int
    words: np.ndarray

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError(f"code length must be >= 1, got {self.length}")
        words = _readonly(self.words).reshape(-1)
        if words.shape[0] != n_words(self.length):
            raise ValueError(f"expected {n_words(self.length)} words for length {self.length}, got {words.shape[0]}")
        tail = self.length % WORD_BITS
        if tail and int(words[-1]) >> tail:
            raise ValueError("padding bits beyond code length must be zero")
        object.__setattr__(self, "words", words)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryCode):
            return NotImplemented
        return self.length == other.length and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.length, self.words.tobytes()))

    def __len__(self) -> int:
        return self.length


@dataclass(frozen=True, eq=True)
class DualCode:
    """Two codes of one point under independent dithers (tau branch, tau' branch)."""

    first: BinaryCode
    second: BinaryCode

    def __post_init__(self) -> None:
        if self.first.length != self.second.length:
            raise ValueError(f"branch lengths differ: {self.first.length} != {self.second.length}")

    @property
    def length(self) -> int:
        return self.first.length


def pack(signs: Sequence[int] | np.ndarray) -> BinaryCode:
    """Pack a sequence of +-1 values into a :class:`BinaryCode`."""
    arr = np.asarray(signs)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValueError("signs must be a non-empty 1-D sequence")
    if not np.all((arr == 1) | (arr == -1)):
        raise ValueError("every sign must be exactly -1 or +1")
    words = kernels.pack_bits_numpy((arr == -1)[None, :])[0]
    return BinaryCode(arr.shape[0], words)


def unpack(code: BinaryCode) -> np.ndarray:
    """Return the code's signs as an int8 array of +-1."""
    bits = kernels.unpack_bits(code.words[None, :], code.length)[0]
    return np.where(bits, -1, 1).astype(np.int8)


def from_words(words: np.ndarray, length: int) -> list[BinaryCode]:
    """Wrap each row of a ``(count, words)`` array as a :class:`BinaryCode`."""
    return [BinaryCode(length, row) for row in np.atleast_2d(words)]


def stack_words(codes: Sequence[BinaryCode]) -> np.ndarray:
    if not codes:
        return np.zeros((0, 0), dtype=np.uint64)
    length = codes[0].length
    if any(c.length != length for c in codes):
        raise ValueError("all codes must share one length")
    return np.stack([c.words for c in codes])


def complement(code: BinaryCode) -> BinaryCode:
    """Flip every sign, keeping padding zero."""
    words = ~code.words
    tail = code.length % WORD_BITS
    if tail:
        words = words.copy()
        words[-1] &= np.uint64((1 << tail) - 1)
    return BinaryCode(code.length, words)


def _check_lengths(a: BinaryCode, b: BinaryCode) -> None:
    if a.length != b.length:
        raise ValueError(f"code length mismatch: {a.length} != {b.length}")


def hamming(a: BinaryCode, b: BinaryCode) -> int:
    """Number of positions where the two codes disagree (XOR + popcount)."""
    _check_lengths(a, b)
    return kernels.hamming_pair(a.words, b.words)


def signed_dot(a: BinaryCode, b: BinaryCode) -> int:
    """Inner product of the unpacked +-1 vectors, ``m - 2 * hamming``."""
    _check_lengths(a, b)
    return a.length - 2 * kernels.hamming_pair(a.words, b.words)

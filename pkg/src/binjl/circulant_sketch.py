"""Fast structured embedding with ``A = R_I Gamma_xi D_theta``.

``Gamma_xi[i, j] = xi[(j - i) mod n]`` is a circular cross-correlation with
``xi``; in the Fourier domain it multiplies by ``conj(fft(xi))``. Inputs are
zero-padded to a power-of-two length ``n_pad`` so the transforms stay radix-2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from binjl import kernels, rng
from binjl.bitcode import BinaryCode, DualCode
from binjl.fft import CorrelationPlan
from binjl.gaussian_sketch import QuantizerConfig, _as_input, _check_positive

XI_DISTRIBUTIONS = ("rademacher", "gaussian")
ROW_POLICIES = ("first_m", "seeded_random_subset")


def next_pow2(n: int) -> int:
    return 1 << max(0, int(n) - 1).bit_length()


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def circulant_matvec(xi: np.ndarray, x: np.ndarray, method: str | None = None) -> np.ndarray:
    """``Gamma_xi @ x`` via FFT, ``y[i] = sum_j xi[(j - i) mod n] x[j]``.

    ``x`` may carry leading batch axes. ``method`` picks the transform route
    (see :class:`binjl.fft.CorrelationPlan`); default is by size.
    """
    xi = np.asarray(xi, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    n = xi.shape[0]
    if xi.ndim != 1 or x.shape[-1] != n:
        raise ValueError(f"length mismatch: xi has {xi.shape}, x has {x.shape}")
    if not _is_pow2(n):
        raise ValueError(f"length must be a power of two, got {n}")
    return CorrelationPlan(xi, method)(x)


def explicit_circulant(xi: np.ndarray) -> np.ndarray:
    """Dense ``Gamma_xi``; only for checking the FFT path on small sizes."""
    xi = np.asarray(xi, dtype=np.float64)
    n = xi.shape[0]
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return xi[idx]


@dataclass(frozen=True, eq=False)
class CirculantSketcher:
    m: int
    n: int
    n_pad: int
    lam: float
    seed: int
    xi: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    row_set: np.ndarray = field(repr=False)
    dither: np.ndarray = field(repr=False)
    dither2: np.ndarray = field(repr=False)
    xi_distribution: str = "rademacher"
    row_policy: str = "first_m"
    quantizer: QuantizerConfig = QuantizerConfig()
    # spectrum cache for xi, built once
    plan: CorrelationPlan = field(init=False, repr=False)
    _contiguous: bool = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not _is_pow2(self.n_pad) or self.n_pad < self.n:
            raise ValueError(f"n_pad must be a power of two >= n, got {self.n_pad}")
        if not 1 <= self.m <= self.n_pad:
            raise ValueError(f"m must satisfy 1 <= m <= n_pad={self.n_pad}, got {self.m}")
        if self.row_set.shape != (self.m,) or np.unique(self.row_set).shape[0] != self.m:
            raise ValueError("row_set must hold m distinct indices")
        if self.row_set.min() < 0 or self.row_set.max() >= self.n_pad:
            raise ValueError("row_set indices out of range")
        for d in (self.dither, self.dither2):
            if d.shape != (self.m,) or np.any(np.abs(d) > self.lam):
                raise ValueError("dithers must have shape (m,) with entries in [-lambda, lambda]")
        object.__setattr__(self, "plan", CorrelationPlan(self.xi))
        contiguous = bool(np.array_equal(self.row_set, np.arange(self.m)))
        object.__setattr__(self, "_contiguous", contiguous)

    @property
    def kind(self) -> str:
        return "circulant"

    def explicit_matrix(self) -> np.ndarray:
        """Dense ``R_I Gamma_xi D_theta`` restricted to the first ``n`` columns."""
        full = explicit_circulant(self.xi)[self.row_set] * self.theta[None, :]
        return full[:, : self.n]


def sample_circulant_sketcher(
    seed: int,
    m: int,
    n: int,
    lam: float,
    xi_distribution: str = "rademacher",
    row_policy: str = "first_m",
    *,
    sign_zero: int = 1,
) -> CirculantSketcher:
    _check_positive(m=m, n=n, lam=lam)
    if xi_distribution not in XI_DISTRIBUTIONS:
        raise ValueError(f"xi_distribution must be one of {XI_DISTRIBUTIONS}, got {xi_distribution!r}")
    if row_policy not in ROW_POLICIES:
        raise ValueError(f"row_policy must be one of {ROW_POLICIES}, got {row_policy!r}")
    n_pad = next_pow2(n)
    if m > n_pad:
        raise ValueError(f"m={m} exceeds padded dimension n_pad={n_pad}")

    xi_gen = rng.substream(seed, rng.XI)
    if xi_distribution == "rademacher":
        xi = xi_gen.choice(np.array([-1.0, 1.0]), size=n_pad)
    else:
        xi = xi_gen.standard_normal(n_pad)
    theta = rng.substream(seed, rng.THETA).choice(np.array([-1.0, 1.0]), size=n_pad)
    if row_policy == "first_m":
        row_set = np.arange(m)
    else:
        row_set = np.sort(rng.substream(seed, rng.ROW_SET).choice(n_pad, size=m, replace=False))
    dither = rng.substream(seed, rng.DITHER).uniform(-lam, lam, size=m)
    dither2 = rng.substream(seed, rng.DITHER2).uniform(-lam, lam, size=m)
    return CirculantSketcher(
        m, n, n_pad, float(lam), seed, xi, theta, row_set, dither, dither2,
        xi_distribution, row_policy, QuantizerConfig(sign_zero),
    )


def apply_structured(sketcher: CirculantSketcher, x: np.ndarray) -> np.ndarray:
    """``A x`` in ``O(n_pad log n_pad)``; accepts ``(n,)`` or ``(count, n)``."""
    x = _as_input(x, sketcher.n)
    padded = np.zeros(x.shape[:-1] + (sketcher.n_pad,))
    padded[..., : sketcher.n] = x
    padded *= sketcher.theta
    y = sketcher.plan(padded)
    if sketcher._contiguous:
        return y[..., : sketcher.m]
    return y[..., sketcher.row_set]


def embed_dual_words(sketcher: CirculantSketcher, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Packed words of both branches; batch inputs give two ``(count, words)`` arrays."""
    ax = apply_structured(sketcher, x)
    neg = sketcher.quantizer.zero_is_negative
    return kernels.quantize_pack(ax, sketcher.dither, neg), kernels.quantize_pack(ax, sketcher.dither2, neg)


def embed_dual(sketcher: CirculantSketcher, x: np.ndarray) -> DualCode:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("embed_dual takes a single vector; use embed_dual_words for batches")
    w1, w2 = embed_dual_words(sketcher, x)
    return DualCode(BinaryCode(sketcher.m, w1), BinaryCode(sketcher.m, w2))

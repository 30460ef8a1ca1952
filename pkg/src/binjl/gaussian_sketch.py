"""Dense Gaussian dithered embedding ``x -> sign(Ax + tau)``.

Also home to the one-dimensional analytic oracles for this construction: the
exact disagreement probability of two dithered signs and the bias bound of the
rescaled Hamming distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from binjl import kernels, rng
from binjl.bitcode import BinaryCode, DualCode


@dataclass(frozen=True)
class QuantizerConfig:
    """Which sign ``sign(0)`` gets. The dither is continuous so it is a null event."""

    sign_zero: int = 1

    def __post_init__(self) -> None:
        if self.sign_zero not in (1, -1):
            raise ValueError(f"sign_zero must be +1 or -1, got {self.sign_zero}")

    @property
    def zero_is_negative(self) -> bool:
        return self.sign_zero == -1


def _check_positive(**kwargs: float) -> None:
    for name, value in kwargs.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


def _as_input(x: np.ndarray, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != n:
        raise ValueError(f"input dimension {x.shape[-1]} does not match sketcher dimension {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input contains non-finite entries")
    return x


@dataclass(frozen=True, eq=False)
class GaussianSketcher:
    m: int
    n: int
    lam: float
    seed: int
    rows: np.ndarray = field(repr=False)
    dither: np.ndarray = field(repr=False)
    # independent second dither, only sampled when dual codes are requested
    dither2: np.ndarray | None = field(default=None, repr=False)
    quantizer: QuantizerConfig = QuantizerConfig()

    def __post_init__(self) -> None:
        if self.rows.shape != (self.m, self.n):
            raise ValueError(f"rows must have shape {(self.m, self.n)}, got {self.rows.shape}")
        for d in (self.dither, self.dither2):
            if d is None:
                continue
            if d.shape != (self.m,):
                raise ValueError(f"dither must have shape ({self.m},), got {d.shape}")
            if np.any(np.abs(d) > self.lam):
                raise ValueError("dither entries must lie in [-lambda, lambda]")

    @property
    def kind(self) -> str:
        return "gaussian"

    def project(self, x: np.ndarray) -> np.ndarray:
        """``Ax`` for one vector ``(n,)`` or a batch ``(count, n)``."""
        x = _as_input(x, self.n)
        return x @ self.rows.T


def sample_gaussian_sketcher(
    seed: int,
    m: int,
    n: int,
    lam: float,
    *,
    dual: bool = False,
    sign_zero: int = 1,
) -> GaussianSketcher:
    _check_positive(m=m, n=n, lam=lam)
    rows = rng.substream(seed, rng.ROWS).standard_normal((m, n))
    dither = rng.substream(seed, rng.DITHER).uniform(-lam, lam, size=m)
    dither2 = rng.substream(seed, rng.DITHER2).uniform(-lam, lam, size=m) if dual else None
    return GaussianSketcher(m, n, float(lam), seed, rows, dither, dither2, QuantizerConfig(sign_zero))


def default_lambda(radius: float, delta: float) -> float:
    """``R * sqrt(2 log(e R / delta))``: keeps the clipping bias far below ``delta``."""
    _check_positive(radius=radius, delta=delta)
    return radius * math.sqrt(2.0 * math.log(math.e * radius / delta))


def embed_words(sketcher: GaussianSketcher, x: np.ndarray, dither: np.ndarray | None = None) -> np.ndarray:
    """Packed words of ``sign(Ax + tau)``; batch inputs give ``(count, words)``."""
    tau = sketcher.dither if dither is None else dither
    return kernels.quantize_pack(sketcher.project(x), tau, sketcher.quantizer.zero_is_negative)


def embed(sketcher: GaussianSketcher, x: np.ndarray) -> BinaryCode:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("embed takes a single vector; use embed_words for batches")
    return BinaryCode(sketcher.m, embed_words(sketcher, x))


def embed_dual(sketcher: GaussianSketcher, x: np.ndarray) -> DualCode:
    """Dense counterpart of the circulant dual embedding (needs ``dual=True``)."""
    if sketcher.dither2 is None:
        raise ValueError("sketcher was sampled without a second dither (dual=False)")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("embed_dual takes a single vector")
    ax = sketcher.project(x)
    neg = sketcher.quantizer.zero_is_negative
    return DualCode(
        BinaryCode(sketcher.m, kernels.quantize_pack(ax, sketcher.dither, neg)),
        BinaryCode(sketcher.m, kernels.quantize_pack(ax, sketcher.dither2, neg)),
    )


def collision_probability(a: float, b: float, lam: float) -> float:
    """Exact ``P(sign(a + s) != sign(b + s))`` for ``s`` uniform on ``[-lam, lam]``.

    The signs differ exactly when ``-s`` falls between ``a`` and ``b``, so this
    is the length of ``[min(a,b), max(a,b)]`` intersected with ``[-lam, lam]``
    divided by ``2 lam``.
    """
    _check_positive(lam=lam)
    lo, hi = (a, b) if a <= b else (b, a)
    return max(0.0, min(hi, lam) - max(lo, -lam)) / (2.0 * lam)


def collision_probabilities(a: np.ndarray, b: np.ndarray, lam: float) -> np.ndarray:
    """Vectorised :func:`collision_probability`."""
    _check_positive(lam=lam)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    return np.maximum(0.0, np.minimum(hi, lam) - np.maximum(lo, -lam)) / (2.0 * lam)


def bias_bound(lam: float, r: float) -> float:
    """Bound on ``|E d_lambda(f(x), f(y)) - ||x - y|||`` when both norms are at most ``r``."""
    _check_positive(lam=lam)
    if r < 0:
        raise ValueError(f"r must be non-negative, got {r}")
    if r == 0:
        return 0.0
    return 2.0 * r * math.exp(-(lam**2) / (2.0 * r**2))

"""Read Euclidean quantities back out of codes.

Distance codes (one dither) use the rescaled Hamming distance
``sqrt(2 pi) lam / m * d_H``. Dual codes (two dithers) use the cross pairing
``<f(x), f'(y)> + <f'(x), f(y)>`` scaled by ``lam^2 / (2m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from binjl.bitcode import BinaryCode, DualCode, hamming, signed_dot
from binjl.gaussian_sketch import collision_probabilities

SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class EstimatorParams:
    lam: float
    m: int

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")

    @property
    def distance_scale(self) -> float:
        return SQRT_2PI * self.lam / self.m

    @property
    def bilinear_scale(self) -> float:
        return self.lam**2 / (2 * self.m)


def _check(params: EstimatorParams, *codes: BinaryCode | DualCode) -> None:
    for c in codes:
        if c.length != params.m:
            raise ValueError(f"code length {c.length} does not match params.m={params.m}")


def estimate_distance(a: BinaryCode, b: BinaryCode, params: EstimatorParams) -> float:
    _check(params, a, b)
    return params.distance_scale * hamming(a, b)


def sm_bilinear(u: DualCode, v: DualCode) -> int:
    """Integer value of the swap-pairing between two dual codes, in ``[-2m, 2m]``."""
    if u.length != v.length:
        raise ValueError(f"code length mismatch: {u.length} != {v.length}")
    return signed_dot(u.first, v.second) + signed_dot(u.second, v.first)


def estimate_inner_product(u: DualCode, v: DualCode, params: EstimatorParams) -> float:
    _check(params, u, v)
    return params.bilinear_scale * sm_bilinear(u, v)


def estimate_sq_distance(u: DualCode, v: DualCode, params: EstimatorParams) -> float:
    """Squared-distance estimate, computed by polarisation from three pairings.

    Can be negative for far-from-typical dithers; its range is ``[-4 lam^2, 4 lam^2]``.
    """
    _check(params, u, v)
    total = sm_bilinear(u, u) + sm_bilinear(v, v) - 2 * sm_bilinear(u, v)
    return params.bilinear_scale * total


def clamp(t: np.ndarray | float, lam: float) -> np.ndarray | float:
    return np.minimum(np.maximum(t, -lam), lam)


def expected_product(a: float, b: float, lam: float) -> float:
    """``lam^2 E[sign(a + s) sign(b + s')]`` with independent uniform dithers.

    Each factor has mean ``clamp(a)/lam``, so the value is ``clamp(a) * clamp(b)``.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    return float(clamp(a, lam)) * float(clamp(b, lam))


def expected_inner_product_given_rows(row_dots_x: np.ndarray, row_dots_y: np.ndarray, lam: float) -> float:
    """Mean over fresh dithers of :func:`estimate_inner_product` for fixed ``A``."""
    ax, ay = _paired(row_dots_x, row_dots_y)
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    return float(np.mean(clamp(ax, lam) * clamp(ay, lam)))


def expected_sq_distance_given_rows(row_dots_x: np.ndarray, row_dots_y: np.ndarray, lam: float) -> float:
    """Mean over fresh dithers of :func:`estimate_sq_distance` for fixed ``A``."""
    ax, ay = _paired(row_dots_x, row_dots_y)
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    return float(np.mean((clamp(ax, lam) - clamp(ay, lam)) ** 2))


def expected_distance_given_rows(row_dots_x: np.ndarray, row_dots_y: np.ndarray, lam: float) -> float:
    """Exact mean over fresh dithers of :func:`estimate_distance` given ``A``.

    ``row_dots_x[i]`` is ``<a_i, x>``. Each bit disagrees with the collision
    probability of the two projections, so the mean is
    ``sqrt(2 pi) lam / m * sum_i P_i``.
    """
    ax, ay = _paired(row_dots_x, row_dots_y)
    p = collision_probabilities(ax, ay, lam)
    return SQRT_2PI * lam / ax.shape[0] * float(p.sum())


def _paired(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.shape != y.shape or x.shape[0] == 0:
        raise ValueError(f"row dot vectors must be non-empty with equal length, got {x.shape} and {y.shape}")
    return x, y


# batch forms over word arrays; used by the verification campaigns


def distance_matrix(hamming_matrix: np.ndarray, params: EstimatorParams) -> np.ndarray:
    return params.distance_scale * np.asarray(hamming_matrix, dtype=np.float64)


def bilinear_matrix(cross_12: np.ndarray, m: int) -> np.ndarray:
    """All-pairs swap-pairing from ``cross_12[i, j] = d_H(first_i, second_j)``.

    ``S[i, j] = (m - 2 H12[i, j]) + (m - 2 H12[j, i])``.
    """
    h = np.asarray(cross_12, dtype=np.int64)
    return (m - 2 * h) + (m - 2 * h.T)


def sq_distance_matrix(bilinear: np.ndarray, params: EstimatorParams) -> np.ndarray:
    diag = np.diag(bilinear)
    return params.bilinear_scale * (diag[:, None] + diag[None, :] - 2 * bilinear).astype(np.float64)

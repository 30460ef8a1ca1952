"""Complexity of a finite dataset and the (lambda, m) advisor built on it.

Two quantities drive the bit budget: a covering number of the data at scale
``epsilon`` (bounded above by a greedy net) and the Gaussian complexity of the
short difference vectors ``(D - D) ∩ epsilon B``, estimated by Monte Carlo.
None of the absolute constants in the sufficient conditions are known; they
are all exposed through :class:`AdvisorConstants` and default to 1.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from binjl import rng
from binjl.errors import RegimeInfeasibleError


@dataclass(frozen=True)
class ComplexityReport:
    epsilon: float
    covering_upper: int
    gauss_localized: float
    gauss_stderr: float
    trials: int
    radius: float
    dimension: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class AdvisorConstants:
    c_lambda: float = 1.0
    c_eps: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    c_r: float = 1.0


@dataclass(frozen=True)
class ParameterAdvice:
    lam: float
    m: int
    epsilon_used: float
    constants: AdvisorConstants
    covering_term: float = 0.0
    width_term: float = 0.0
    alpha: float | None = None
    iterations: int = 0
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _points(D: np.ndarray) -> np.ndarray:
    D = np.asarray(D, dtype=np.float64)
    if D.ndim == 1:
        D = D[None, :] if D.size else D.reshape(0, 0)
    return D


def greedy_net(D: np.ndarray, epsilon: float) -> np.ndarray:
    """Farthest-point greedy epsilon-net; returns row indices into ``D``.

    Starts at row 0 and keeps adding the point farthest from the current net
    (lowest index on ties) while that distance exceeds ``epsilon``. The result
    covers ``D`` at radius ``epsilon`` and its points are pairwise more than
    ``epsilon`` apart.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    D = _points(D)
    if D.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    net = [0]
    dist = np.linalg.norm(D - D[0], axis=1)
    while True:
        far = int(np.argmax(dist))
        if dist[far] <= epsilon:
            break
        net.append(far)
        dist = np.minimum(dist, np.linalg.norm(D - D[far], axis=1))
    return np.asarray(net, dtype=np.int64)


def close_differences(D: np.ndarray, epsilon: float) -> np.ndarray:
    """Difference vectors ``x - y`` of distinct pairs with ``||x - y|| <= epsilon``.

    One vector per unordered pair; its negation gives the same ``|<g, .>|``.
    """
    D = _points(D)
    if D.shape[0] < 2:
        return np.zeros((0, D.shape[1] if D.ndim == 2 else 0))
    dist = cdist(D, D)
    i, j = np.nonzero(np.triu(dist <= epsilon, k=1))
    diffs = D[i] - D[j]
    return diffs[np.linalg.norm(diffs, axis=1) > 0]


def localized_gaussian_complexity(
    D: np.ndarray, epsilon: float, trials: int = 1000, seed: int = 0, *, chunk: int = 256
) -> tuple[float, float]:
    """Monte-Carlo ``E max |<g, x - y>|`` over pairs within ``epsilon``; ``(mean, stderr)``."""
    if trials < 2:
        raise ValueError(f"trials must be >= 2, got {trials}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    diffs = close_differences(D, epsilon)
    if diffs.shape[0] == 0:
        return 0.0, 0.0
    gen = rng.substream(seed, 0)
    sups = np.empty(trials)
    for start in range(0, trials, chunk):
        k = min(chunk, trials - start)
        g = gen.standard_normal((k, diffs.shape[1]))
        sups[start : start + k] = np.abs(g @ diffs.T).max(axis=1)
    return float(sups.mean()), float(sups.std(ddof=1) / math.sqrt(trials))


def complexity_report(D: np.ndarray, epsilon: float, trials: int = 1000, seed: int = 0) -> ComplexityReport:
    D = _points(D)
    net = greedy_net(D, epsilon)
    width, se = localized_gaussian_complexity(D, epsilon, trials, seed)
    radius = float(np.linalg.norm(D, axis=1).max()) if D.shape[0] else 0.0
    return ComplexityReport(float(epsilon), int(net.shape[0]), width, se, int(trials), radius, int(D.shape[1]) if D.ndim == 2 else 0)


def top_k_norm(x: np.ndarray, k: int) -> float:
    """Euclidean norm of the ``k`` largest-magnitude entries of ``x``."""
    x = np.abs(np.asarray(x, dtype=np.float64).reshape(-1))
    if not 1 <= k <= x.shape[0]:
        raise ValueError(f"k must lie in [1, {x.shape[0]}], got {k}")
    top = np.partition(x, x.shape[0] - k)[x.shape[0] - k :]
    return float(np.sqrt(np.sum(top**2)))


def bit_budget_gaussian(lam: float, delta: float, covering: float, width: float, c1: float = 1.0, c2: float = 1.0) -> tuple[float, float]:
    """The two summands of the dense-construction bit budget (before ceil)."""
    log_cover = math.log(max(2.0, covering))
    return c1 * lam**2 * delta**-2 * log_cover, c2 * lam * delta**-3 * width**2


def bit_budget_circulant(
    alpha: float, lam: float, delta: float, covering: float, width: float, c1: float = 1.0, c2: float = 1.0
) -> tuple[float, float]:
    """The two summands of the circulant-construction bit budget (before ceil)."""
    log_cover = math.log(max(2.0, covering))
    return c1 * alpha**2 * delta**-2 * log_cover, c2 * alpha**2 * lam**-2 * delta**-3 * width**2


def advise_gaussian(
    R: float, delta: float, report: ComplexityReport, constants: AdvisorConstants = AdvisorConstants()
) -> ParameterAdvice:
    """Advise ``(lambda, m)`` for the dense Gaussian construction.

    ``lambda`` is fixed first from ``(R, delta)``; the report's net scale is
    then checked against ``c_eps * delta / sqrt(log(e lambda / delta))``.
    """
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    if not 0 < delta <= R / 2:
        raise ValueError(f"delta must satisfy 0 < delta <= R/2 (R={R}), got {delta}")
    c = constants
    lam = c.c_lambda * R * math.sqrt(max(1.0, math.log(R / delta)))
    eps_max = c.c_eps * delta / math.sqrt(math.log(math.e * lam / delta))
    if report.epsilon > eps_max:
        raise ValueError(
            f"net scale too coarse: need epsilon <= c_eps*delta/sqrt(log(e*lambda/delta)) = {eps_max:.6g}, "
            f"report has epsilon = {report.epsilon:.6g}"
        )
    cov, wid = bit_budget_gaussian(lam, delta, report.covering_upper, report.gauss_localized, c.c1, c.c2)
    return ParameterAdvice(lam, max(1, math.ceil(cov + wid)), report.epsilon, c, cov, wid)


def circulant_alpha(n: int, eta: float) -> float:
    """Polylog factor ``log(n)^4 + log(1/eta)``."""
    return math.log(n) ** 4 + math.log(1.0 / eta)


def solve_circulant_lambda(alpha: float, R: float, delta: float, c_lambda: float = 1.0, max_iter: int = 20, rtol: float = 1e-6) -> tuple[float, int]:
    """Fixed point of ``lam = c * alpha * R * sqrt(log(e lam^2 / (delta R^2)))`` from ``lam0 = alpha R``."""
    lam = alpha * R
    for it in range(1, max_iter + 1):
        arg = math.e * lam**2 / (delta * R**2)
        new = c_lambda * alpha * R * math.sqrt(max(math.log(arg), 0.0))
        if new <= 0:
            raise ValueError("lambda iteration collapsed to zero; increase c_lambda")
        if abs(new - lam) <= rtol * new:
            return new, it
        lam = new
    raise ValueError(f"lambda fixed-point iteration did not converge in {max_iter} iterations")


def advise_circulant(
    R: float,
    delta: float,
    eta: float,
    n: int,
    report: ComplexityReport,
    constants: AdvisorConstants = AdvisorConstants(),
) -> ParameterAdvice:
    """Advise ``(lambda, m)`` for the structured construction.

    Raises :class:`RegimeInfeasibleError` when ``R^2 < delta lambda^2``,
    i.e. ``delta`` is too large for the lambda the polylog factor forces.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if not R >= 1:
        raise ValueError(f"R must be >= 1, got {R}")
    if not 0 < eta <= 0.5:
        raise ValueError(f"eta must lie in (0, 1/2], got {eta}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    c = constants
    alpha = circulant_alpha(n, eta)
    lam, iterations = solve_circulant_lambda(alpha, R, delta, c.c_lambda)
    notes = []
    if lam < R:
        notes.append(f"lambda raised from {lam:.6g} to R={R:g} (construction needs lambda >= R)")
        lam = float(R)
    if R**2 < delta * lam**2:
        raise RegimeInfeasibleError(
            f"regime violated: R^2 >= delta*lambda^2 fails ({R**2:.6g} < {delta * lam**2:.6g}); "
            f"delta={delta:g} is too large for lambda={lam:.6g}"
        )
    r_max = c.c_r * delta * R
    if report.epsilon > r_max:
        raise ValueError(f"net scale too coarse: need epsilon <= c_r*delta*R = {r_max:.6g}, report has {report.epsilon:.6g}")
    cov, wid = bit_budget_circulant(alpha, lam, delta, report.covering_upper, report.gauss_localized, c.c1, c.c2)
    return ParameterAdvice(lam, max(1, math.ceil(cov + wid)), report.epsilon, c, cov, wid, alpha, iterations, notes)

"""Statistical verification campaigns.

A campaign draws one fresh sketcher per seed, embeds the whole dataset and
records the worst pairwise error of the estimator against double-precision
truth. Per-run seeds come from :func:`binjl.rng.derive_seed`, so every run of
a campaign can be replayed on its own.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from binjl import kernels
from binjl.circulant_sketch import embed_dual_words, next_pow2, sample_circulant_sketcher
from binjl.estimators import EstimatorParams, bilinear_matrix, distance_matrix, sq_distance_matrix
from binjl.gaussian_sketch import embed_words, sample_gaussian_sketcher
from binjl.harness.io import FORMAT_VERSION, DatasetMatrix, SketchManifest
from binjl.rng import derive_seed


@dataclass
class VerificationReport:
    kind: str
    estimator: str
    delta_target: float
    lam: float
    m: int
    master_seed: int
    seeds: list[int]
    per_seed_sup: list[float]
    sup_error: float
    mean_error: float
    failure_fraction: float
    trials: int
    manifest: dict
    # inner-product campaigns also track the squared-distance estimator
    sq_threshold: float | None = None
    sq_per_seed_sup: list[float] | None = None
    sq_sup_error: float | None = None
    sq_mean_error: float | None = None
    sq_failure_fraction: float | None = None
    format_version: int = FORMAT_VERSION
    wall_times: list[float] = field(default_factory=list)

    def to_dict(self, include_wall_times: bool = True) -> dict:
        d = asdict(self)
        if not include_wall_times:
            d.pop("wall_times")
        return d

    def to_json(self, include_wall_times: bool = True) -> str:
        return json.dumps(self.to_dict(include_wall_times), indent=2, sort_keys=True)


def _check_params(lam: float, m: int, seeds: int) -> None:
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if seeds < 1:
        raise ValueError(f"need at least one seed, got {seeds}")


def _dataset(data) -> DatasetMatrix:
    return data if isinstance(data, DatasetMatrix) else DatasetMatrix(np.asarray(data, dtype=np.float64))


def _run(fn, seeds: list[int], workers: int) -> list:
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, seeds))
    return [fn(s) for s in seeds]


def _manifest_template(kind: str, m: int, n: int, lam: float, **extra) -> dict:
    d = SketchManifest(kind, 0, m, n, float(lam), **extra).to_dict()
    d["seed"] = None
    return d


def _failure_fraction(per_seed: list[float], threshold: float) -> float:
    return sum(1 for e in per_seed if e > threshold) / len(per_seed)


def distance_errors(data: DatasetMatrix, lam: float, m: int, seed: int) -> np.ndarray:
    """Absolute errors of the distance estimator over unordered distinct pairs, one seed."""
    sk = sample_gaussian_sketcher(seed, m, data.n, lam)
    words = embed_words(sk, data.points)
    est = distance_matrix(kernels.hamming_cross(words, words), EstimatorParams(lam, m))
    truth = cdist(data.points, data.points)
    iu = np.triu_indices(data.count, k=1)
    return np.abs(est - truth)[iu]


def verify_distance_embedding(
    dataset, delta: float, lam: float, m: int, seeds: int, master_seed: int = 0, *, workers: int = 1
) -> VerificationReport:
    """Sup-error campaign for the dense distance embedding."""
    _check_params(lam, m, seeds)
    data = _dataset(dataset)
    run_seeds = [derive_seed(master_seed, k) for k in range(seeds)]

    def one(seed: int):
        t0 = time.perf_counter()
        err = distance_errors(data, lam, m, seed)
        return err, time.perf_counter() - t0

    results = _run(one, run_seeds, workers)
    per_seed = [float(e.max()) if e.size else 0.0 for e, _ in results]
    n_terms = sum(e.size for e, _ in results)
    mean = math.fsum(float(v) for e, _ in results for v in e) / n_terms if n_terms else 0.0
    return VerificationReport(
        kind="gaussian",
        estimator="distance",
        delta_target=float(delta),
        lam=float(lam),
        m=int(m),
        master_seed=int(master_seed),
        seeds=run_seeds,
        per_seed_sup=per_seed,
        sup_error=max(per_seed),
        mean_error=mean,
        failure_fraction=_failure_fraction(per_seed, delta),
        trials=seeds,
        manifest=_manifest_template("gaussian", m, data.n, lam),
        wall_times=[t for _, t in results],
    )


def inner_product_errors(
    data: DatasetMatrix,
    lam: float,
    m: int,
    seed: int,
    kind: str = "circulant",
    xi_distribution: str = "rademacher",
    row_policy: str = "first_m",
) -> tuple[np.ndarray, np.ndarray]:
    """One seed: (normalised inner-product errors over i <= j, squared-distance errors over i < j)."""
    if kind == "circulant":
        sk = sample_circulant_sketcher(seed, m, data.n, lam, xi_distribution, row_policy)
        w1, w2 = embed_dual_words(sk, data.points)
    elif kind == "gaussian":
        sk = sample_gaussian_sketcher(seed, m, data.n, lam, dual=True)
        ax = sk.project(data.points)
        neg = sk.quantizer.zero_is_negative
        w1 = kernels.quantize_pack(ax, sk.dither, neg)
        w2 = kernels.quantize_pack(ax, sk.dither2, neg)
    else:
        raise ValueError(f"unknown sketch kind {kind!r}")
    params = EstimatorParams(lam, m)
    bil = bilinear_matrix(kernels.hamming_cross(w1, w2), m)
    ip_est = params.bilinear_scale * bil.astype(np.float64)
    gram = data.points @ data.points.T
    sq_truth = cdist(data.points, data.points, "sqeuclidean")
    ip_err = np.abs(ip_est - gram)[np.triu_indices(data.count, k=0)] / lam**2
    sq_err = np.abs(sq_distance_matrix(bil, params) - sq_truth)[np.triu_indices(data.count, k=1)]
    return ip_err, sq_err


def verify_inner_product_embedding(
    dataset,
    delta: float,
    lam: float,
    m: int,
    seeds: int,
    master_seed: int = 0,
    *,
    kind: str = "circulant",
    xi_distribution: str = "rademacher",
    row_policy: str = "first_m",
    workers: int = 1,
) -> VerificationReport:
    """Sup-error campaign for the dual-dither inner-product embedding.

    ``sup_error`` is normalised by ``lam^2`` (target ``delta``); the squared
    distance error is reported raw against ``4 delta lam^2``.
    """
    _check_params(lam, m, seeds)
    data = _dataset(dataset)
    run_seeds = [derive_seed(master_seed, k) for k in range(seeds)]

    def one(seed: int):
        t0 = time.perf_counter()
        ip, sq = inner_product_errors(data, lam, m, seed, kind, xi_distribution, row_policy)
        return ip, sq, time.perf_counter() - t0

    results = _run(one, run_seeds, workers)
    ip_sup = [float(ip.max()) for ip, _, _ in results]
    sq_sup = [float(sq.max()) if sq.size else 0.0 for _, sq, _ in results]
    ip_all = [float(v) for ip, _, _ in results for v in ip]
    sq_all = [float(v) for _, sq, _ in results for v in sq]
    sq_threshold = 4.0 * delta * lam**2
    if kind == "circulant":
        template = _manifest_template(
            kind, m, data.n, lam, n_pad=next_pow2(data.n), xi_distribution=xi_distribution, row_policy=row_policy
        )
    else:
        template = _manifest_template(kind, m, data.n, lam)
    return VerificationReport(
        kind=kind,
        estimator="inner_product",
        delta_target=float(delta),
        lam=float(lam),
        m=int(m),
        master_seed=int(master_seed),
        seeds=run_seeds,
        per_seed_sup=ip_sup,
        sup_error=max(ip_sup),
        mean_error=math.fsum(ip_all) / len(ip_all),
        failure_fraction=_failure_fraction(ip_sup, delta),
        trials=seeds,
        manifest=template,
        sq_threshold=sq_threshold,
        sq_per_seed_sup=sq_sup,
        sq_sup_error=max(sq_sup),
        sq_mean_error=math.fsum(sq_all) / len(sq_all) if sq_all else 0.0,
        sq_failure_fraction=_failure_fraction(sq_sup, sq_threshold),
        wall_times=[t for _, _, t in results],
    )


def error_curve(dataset, lam: float, m_list: list[int], seeds: int, master_seed: int = 0, *, workers: int = 1) -> dict:
    """Median per-seed sup distance error for each ``m`` plus a log-log slope fit.

    The slope is ``None`` (and ``degenerate`` true) when any median is zero,
    e.g. for a single-point dataset.
    """
    m_list = [int(m) for m in m_list]
    if len(m_list) < 2:
        raise ValueError("error_curve needs at least two m values")
    if any(b <= a for a, b in zip(m_list, m_list[1:])):
        raise ValueError(f"m_list must be strictly ascending, got {m_list}")
    data = _dataset(dataset)
    rows = []
    for m in m_list:
        rep = verify_distance_embedding(data, math.inf, lam, m, seeds, master_seed, workers=workers)
        rows.append({"m": m, "median_sup_error": float(np.median(rep.per_seed_sup))})
    medians = np.array([r["median_sup_error"] for r in rows])
    degenerate = bool(np.any(medians <= 0))
    slope = intercept = None
    if not degenerate:
        slope, intercept = (float(v) for v in np.polyfit(np.log(m_list), np.log(medians), 1))
    return {
        "format_version": FORMAT_VERSION,
        "manifest": {**_manifest_template("gaussian", 0, data.n, lam), "m": None},
        "lam": float(lam),
        "master_seed": int(master_seed),
        "seeds": int(seeds),
        "rows": rows,
        "slope": slope,
        "intercept": intercept,
        "degenerate": degenerate,
    }

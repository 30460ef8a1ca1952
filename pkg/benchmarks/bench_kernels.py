"""Compare the numba kernels with their pure-numpy fallbacks.

    python benchmarks/bench_kernels.py [--reps 20]

Both variants are imported side by side, so ``BINJL_DISABLE_NUMBA`` does not
need to be set. Prints median wall time per call and the speedup.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from binjl import fft, kernels
from binjl._jit import NUMBA_AVAILABLE


def median_time(fn, reps: int) -> float:
    fn()
    samples = []
    for _ in range(reps):
        t = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t)
    return statistics.median(samples)


def cases(gen: np.random.Generator):
    a = kernels.pack_bits_numpy(gen.random((512, 4096)) < 0.5)
    b = kernels.pack_bits_numpy(gen.random((512, 4096)) < 0.5)
    yield "hamming_cross 512x512, m=4096", (kernels.hamming_cross_numba, kernels.hamming_cross_numpy), (a, b)
    yield "hamming_rows 512, m=4096", (kernels.hamming_rows_numba, kernels.hamming_rows_numpy), (a, b)

    values = gen.standard_normal((256, 4096))
    dither = gen.uniform(-1, 1, 4096)
    yield "quantize_pack 256x4096", (kernels.quantize_pack_numba, kernels.quantize_pack_numpy), (values, dither, False)

    plan = fft.CorrelationPlan(gen.standard_normal(1 << 18), "fourstep")
    d = gen.standard_normal((1, plan.M1, plan.M2)) + 1j * gen.standard_normal((1, plan.M1, plan.M2))
    out = np.empty_like(d)
    yield (
        "packed spectral combine, n=2^18",
        (fft._packed_combine_numba, fft._packed_combine_numpy),
        (d, plan.alpha, plan.beta, out),
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=20)
    args = parser.parse_args()
    if not NUMBA_AVAILABLE:
        raise SystemExit("numba is not importable (or BINJL_DISABLE_NUMBA is set); nothing to compare")

    gen = np.random.default_rng(0)
    print(f"{'kernel':36s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, (jit_fn, np_fn), fargs in cases(gen):
        t_jit = median_time(lambda: jit_fn(*fargs), args.reps)
        t_np = median_time(lambda: np_fn(*fargs), args.reps)
        print(f"{name:36s} {t_jit * 1e3:10.3f} {t_np * 1e3:10.3f} {t_np / t_jit:8.2f}")


if __name__ == "__main__":
    main()

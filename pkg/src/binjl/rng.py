"""Seeded substreams.

Each random object of a sketcher (rows, dithers, circulant generator, ...) gets
its own PCG64 stream keyed by ``(seed, stream_id)``, so adding rows or a second
dither never perturbs the others. Normals come from numpy's ziggurat sampler.
"""

from __future__ import annotations

import numpy as np

RNG_IDENTIFIER = f"numpy-{np.__version__}/PCG64/SeedSequence-spawn-key/ziggurat-normal"

# stream ids
ROWS = 0
DITHER = 1
DITHER2 = 2
XI = 3
THETA = 4
ROW_SET = 5


def substream(seed: int, stream: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def derive_seed(master_seed: int, counter: int) -> int:
    """Per-run seed for run ``counter`` of a campaign; replayable on its own."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(1 << 20, counter))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))

"""Seedable, counter-based random streams.

All randomness in the package goes through :func:`stream`, which builds a
numpy ``Generator`` on the Philox counter-based bit generator.  A stream is
identified by a root seed plus a path of integers (run index, chunk index,
...), so partitioned work can reproduce exactly the draws a single run
would make.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *path: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(rng: int | np.random.Generator | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return stream(0 if rng is None else rng)

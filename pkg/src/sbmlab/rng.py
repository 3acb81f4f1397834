"""Reproducible random number generation.

All randomness in the package flows through a counter-based Philox
generator seeded from an integer. Gaussian draws use the inverse-CDF
transform (scipy's ndtri) applied to uniform doubles instead of the
generator's native ziggurat path, so streams are stable across platforms
and numpy releases. Categorical draws use an explicit cumulative-sum
inversion for the same reason.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

__all__ = ["make_rng", "derive_seed", "normals", "categorical"]


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Philox generator for `seed`, optionally forked by an integer key path."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(base_seed: int, *key: int) -> int:
    """Stable child seed for (base_seed, key...); used for sweep points/replicates."""
    ss = np.random.SeedSequence(int(base_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def normals(rng: np.random.Generator, size: int) -> np.ndarray:
    """N(0,1) draws via ndtri(uniform); zero uniforms are nudged to 2**-53."""
    u = rng.random(size)
    u = np.where(u == 0.0, 2.0**-53, u)
    return ndtri(u)


def categorical(rng: np.random.Generator, p: np.ndarray, size: int) -> np.ndarray:
    """i.i.d. draws from the distribution `p` by cumulative-sum inversion."""
    cum = np.cumsum(np.asarray(p, dtype=np.float64))
    cum[-1] = 1.0
    return np.searchsorted(cum, rng.random(size), side="right").astype(np.int64)

"""Seeded draws of omega from the product measure.

Every coordinate ``n`` gets its own counter-based (Philox) stream keyed by
``(seed, n)``, so a coordinate's value never depends on which other
coordinates exist or in what order they are drawn.
"""

from __future__ import annotations

import math

import numpy as np

from .distributions import DistributionSpec
from .model import OmegaSample, RandomPotentialModel

_OMEGA_TAG = 1
_TRIAL_TAG = 2
_CANTOR_DIGITS = 53
_U64 = 1 << 64

# 53 ternary digits overflow uint64, so they are assembled as two integer halves
_CANTOR_SPLIT = 27
_POW_HI = 3 ** np.arange(_CANTOR_SPLIT - 1, -1, -1, dtype=np.int64)
_POW_LO = 3 ** np.arange(_CANTOR_DIGITS - _CANTOR_SPLIT - 1, -1, -1, dtype=np.int64)


def _zigzag(n: int) -> int:
    return 2 * n if n >= 0 else -2 * n - 1


def _check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < _U64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent Philox generator for ``(seed, *key)``."""
    ss = np.random.SeedSequence(_check_seed(seed), spawn_key=tuple(key))
    return np.random.Generator(np.random.Philox(ss))


def trial_seed(master_seed: int, i: int) -> int:
    """Seed of Monte Carlo trial ``i`` under ``master_seed``."""
    ss = np.random.SeedSequence(_check_seed(master_seed), spawn_key=(_TRIAL_TAG, int(i)))
    return int(ss.generate_state(1, np.uint64)[0])


def cantor_digits(rng: np.random.Generator, size: int) -> np.ndarray:
    """Ternary digits (0 or 2) of ``size`` Cantor draws, shape ``(size, 53)``."""
    return 2 * rng.integers(0, 2, size=(size, _CANTOR_DIGITS), dtype=np.int64)


def cantor_from_digits(digits: np.ndarray) -> np.ndarray:
    """Correctly rounded value of ``sum_j d_j 3^-j`` for each row of digits."""
    hi = digits[:, :_CANTOR_SPLIT] @ _POW_HI
    lo = digits[:, _CANTOR_SPLIT:] @ _POW_LO
    scale = 3 ** (_CANTOR_DIGITS - _CANTOR_SPLIT)
    denom = 3 ** _CANTOR_DIGITS
    return np.array([(int(h) * scale + int(l)) / denom for h, l in zip(hi, lo)])


def sample_many(spec: DistributionSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` independent draws from ``spec`` using ``rng``."""
    p = spec.params
    if spec.kind == "uniform":
        return p["lo"] + (p["hi"] - p["lo"]) * rng.random(size)
    if spec.kind == "gaussian":
        # Box-Muller on two unit uniforms; 1 - u keeps the log argument positive
        u1 = rng.random(size)
        u2 = rng.random(size)
        z = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * math.pi * u2)
        return p["mean"] + p["sd"] * z
    if spec.kind == "cantor":
        x = cantor_from_digits(cantor_digits(rng, size))
        return p["lo"] + (p["hi"] - p["lo"]) * x
    values = np.array([v for v, _ in p["points"]])
    cdf = np.cumsum([w for _, w in p["points"]])
    idx = np.searchsorted(cdf, rng.random(size), side="right")
    return values[np.minimum(idx, len(values) - 1)]


def sample_one(spec: DistributionSpec, rng: np.random.Generator) -> float:
    return float(sample_many(spec, rng, 1)[0])


def sample_omega(model: RandomPotentialModel, seed: int) -> OmegaSample:
    seed = _check_seed(seed)
    values = {n: sample_one(model.distributions[n], substream(seed, _OMEGA_TAG, _zigzag(n)))
              for n in model.index_set}
    return OmegaSample(values, seed)


def coordinate_draw(spec: DistributionSpec, seed: int, n: int) -> float:
    """The value ``sample_omega`` would assign to index ``n`` under ``spec``."""
    return sample_one(spec, substream(_check_seed(seed), _OMEGA_TAG, _zigzag(n)))

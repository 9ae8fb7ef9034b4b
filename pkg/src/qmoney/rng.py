"""Seeded, splittable random streams.

Every stochastic routine takes an explicit ``numpy.random.Generator``. The
default seed comes from ``QMONEY_SEED`` so whole experiments are
reproducible bit for bit.
"""
import os

import numpy as np

SEED_ENV = "QMONEY_SEED"
FALLBACK_SEED = 20161


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return FALLBACK_SEED
    return int(raw)


def make_rng(seed=None) -> np.random.Generator:
    """Generator seeded from ``seed`` or, if None, the environment default."""
    if seed is None:
        seed = default_seed()
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def split(rng: np.random.Generator, k: int) -> list:
    """``k`` independent child streams derived deterministically from ``rng``."""
    return [np.random.Generator(bg) for bg in rng.bit_generator.spawn(k)]

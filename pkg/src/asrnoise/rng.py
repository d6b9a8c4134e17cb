"""Reproducible per-item random streams.

A child seed is derived from the global seed and a tuple of integer parts
(for example ``(epoch, sentence_id)``) by folding each part through the
SplitMix64 finalizer::

    h = seed mod 2**64
    for part in parts:
        h = splitmix64(h ^ splitmix64(part mod 2**64))

The result seeds a :class:`random.Random` (Mersenne Twister), whose output
for a given integer seed is stable across platforms and Python versions.
Because every stream depends only on its own key, work can be split over any
number of processes without changing the output.
"""

import random

MASK64 = 0xFFFFFFFFFFFFFFFF
DEFAULT_SEED = 20191120

# domain tags keep the training-noise and test-set streams apart
NOISE_STREAM = 1
TESTSET_STREAM = 2


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, *parts: int) -> int:
    h = seed & MASK64
    for part in parts:
        h = splitmix64(h ^ splitmix64(part & MASK64))
    return h


def child_rng(seed: int, *parts: int) -> random.Random:
    return random.Random(derive_seed(seed, *parts))

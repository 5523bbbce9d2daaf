"""Keyed random streams.

Every random draw in the simulator comes from a Philox generator whose key is
derived from ``(seed, *key)`` through :class:`numpy.random.SeedSequence`.
Two streams with different keys are statistically independent, and a stream
depends only on its key, so points can be simulated in any order or in
parallel with identical results.
"""
import numpy as np

from .errors import ValidationError

# channel ids used in stream keys
TRUE_PAIRS = 0
ACCIDENTALS = 1
SIGNAL_SINGLES = 2
HERALD_SINGLES = 3
G2_EVENTS = 16
SAMPLER = 32

_SEED_LIMIT = 2**64


def check_seed(seed):
    if not isinstance(seed, (int, np.integer)) or not 0 <= int(seed) < _SEED_LIMIT:
        raise ValidationError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return int(seed)


def stream(seed, *key):
    """Return an independent generator for ``(seed, *key)``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))

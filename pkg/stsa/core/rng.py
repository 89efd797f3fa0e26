"""
Seeded random number generation.

Every random draw in the package goes through ``make_rng``: a numpy
``Generator`` over the counter-based Philox-4x64 bit generator, keyed by
``SeedSequence([seed, stream])``. The same (seed, stream) pair produces the
same stream on every platform numpy supports.
"""
import numpy as np

# Named streams so unrelated consumers of one seed never share draws
STREAM_NOISE = 0
STREAM_SCENE = 1
STREAM_TEXTURE = 2
STREAM_PARAMS = 3
STREAM_TRAIN = 4


def make_rng(seed: int, stream: int = STREAM_NOISE) -> np.random.Generator:
    """Create the Philox generator for a seed and a named stream."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))

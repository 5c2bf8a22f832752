"""Deterministic seed derivation.

A single top-level 64-bit seed is the only entropy source in the pipeline.
Every consumer derives its own generator with ``derive_rng(seed, *labels)``,
where the labels name the consumer (module name, class id, sample id, ...).
Derivation feeds the seed plus the CRC32 of each label into a
``numpy.random.SeedSequence``, so the mapping is a fixed, documented function
of (seed, labels) and is portable across platforms.  Generators are PCG64,
NumPy's default counter-based bit generator.
"""

import zlib

import numpy as np


def derive_seed_sequence(seed, *labels):
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for label in labels:
        entropy.append(zlib.crc32(str(label).encode("utf-8")))
    return np.random.SeedSequence(entropy)


def derive_rng(seed, *labels):
    """PCG64 generator keyed by (seed, labels)."""
    return np.random.Generator(np.random.PCG64(derive_seed_sequence(seed, *labels)))

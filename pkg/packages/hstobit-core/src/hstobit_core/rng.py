"""Seeded random streams.

Every chain and every simulated replicate owns one ``RngStream``. Streams
are built on numpy's ``SeedSequence`` spawn-key mechanism, so a substream
is a pure function of ``(seed, key)`` and never depends on how many other
streams were created before it or on which worker process runs it.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

PRNG_ALGORITHM = "PCG64"

_MAX_SEED = 2**64 - 1


class RngStream:
    """A reproducible PCG64 stream identified by ``(seed, key)``.

    The underlying ``numpy.random.Generator`` is exposed as ``generator``;
    samplers draw from it directly.
    """

    algorithm = PRNG_ALGORITHM

    def __init__(self, seed: int, key: tuple[int, ...] = ()) -> None:
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
            raise DomainError(f"Seed must be an integer, got {type(seed).__name__}")
        if not 0 <= int(seed) <= _MAX_SEED:
            raise DomainError(f"Seed must be a 64-bit unsigned integer, got {seed}")
        if any(k < 0 for k in key):
            raise DomainError(f"Substream keys must be nonnegative, got {key}")
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def substream(self, *key: int) -> RngStream:
        """Derive an independent child stream from this stream's identity.

        The child depends only on ``(seed, self.key + key)``; drawing from
        the parent does not change it.
        """
        return RngStream(self.seed, self.key + tuple(key))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, key={self.key}, algorithm={self.algorithm})"

"""Splittable, seeded random streams.

A stream is identified by ``(seed, parent path, stream_id)``; the identity maps
onto a :class:`numpy.random.SeedSequence` spawn key, so distinct streams are
statistically independent and a given stream always yields the same variates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0
    parent: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def key(self) -> tuple[int, ...]:
        return self.parent + (self.stream_id,)

    def generator(self) -> np.random.Generator:
        """Return a fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(int(self.seed), spawn_key=self.key)
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, j: int) -> "RngStream":
        """Substream ``j`` of this stream (independent of all siblings)."""
        return RngStream(self.seed, int(j), self.key)


def as_generator(rng) -> np.random.Generator:
    """Accept an :class:`RngStream`, a ``Generator`` or an int seed."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return np.random.default_rng(rng)
    raise TypeError(f"cannot build a generator from {type(rng).__name__}")

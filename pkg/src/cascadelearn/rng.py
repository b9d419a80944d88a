"""Hash-derived random substreams.

A stream is identified by ``(master_seed, context, vertex, index)``. The
generator for a coordinate is seeded from a keyed BLAKE2b digest of those
fields, so simulations can run in any order (or in parallel) and still
reproduce the same coins.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, replace

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RandomStream:
    master_seed: int
    context: str = "root"
    vertex: int = -1
    index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) & _MASK64)

    def substream(self, context: str | None = None, vertex: int | None = None,
                  index: int | None = None) -> RandomStream:
        changes = {}
        if context is not None:
            changes["context"] = context
        if vertex is not None:
            changes["vertex"] = int(vertex)
        if index is not None:
            changes["index"] = int(index)
        return replace(self, **changes)

    def seed_int(self) -> int:
        """128-bit seed for this coordinate."""
        key = self.master_seed.to_bytes(8, "little")
        msg = f"{self.context}\x1f{self.vertex}\x1f{self.index}".encode()
        digest = hashlib.blake2b(msg, key=key, digest_size=16).digest()
        return int.from_bytes(digest, "little")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed_int()))

    def python_random(self) -> random.Random:
        return random.Random(self.seed_int())


def derive_seed(master_seed: int, *labels: object) -> int:
    """64-bit seed derived from a master seed and arbitrary labels."""
    stream = RandomStream(master_seed, context="/".join(map(str, labels)))
    return stream.seed_int() & _MASK64

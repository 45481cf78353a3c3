"""
Seeded random streams.
One root seed spawns independent named substreams so that changing one
algorithm's consumption never perturbs another's draws.
"""

import zlib
from typing import Dict, Iterable

import numpy as np


# Substream names used by the round protocol.
LEADER_SAMPLE = "leader-sample"
LEADER_REWARD = "leader-reward"
FOLLOWER_REWARD = "follower-reward"
GAME = "game"

_BLOCK = 4096


class RngStream:
    """
    Buffered uniform stream over numpy's PCG64.

    Draws are pulled in blocks for speed, but ``counter`` tracks individual
    draws so reproducibility is per draw, not per block.
    """

    def __init__(self, seed: int, name: str = ""):
        self.seed = int(seed)
        self.name = name
        key = (zlib.crc32(name.encode("utf-8")),) if name else ()
        self._generator = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=self.seed & (2**64 - 1), spawn_key=key))
        )
        self._buffer = np.empty(0)
        self._pos = 0
        self.counter = 0

    @property
    def generator(self) -> np.random.Generator:
        """Underlying generator, for bulk draws that do not need per-draw counting."""
        return self._generator

    def uniform(self) -> float:
        """One draw from U[0, 1)."""
        if self._pos >= self._buffer.shape[0]:
            self._buffer = self._generator.random(_BLOCK)
            self._pos = 0
        u = self._buffer[self._pos]
        self._pos += 1
        self.counter += 1
        return float(u)

    def bernoulli(self, p: float) -> int:
        return 1 if self.uniform() < p else 0


def spawn_streams(seed: int, names: Iterable[str] = (LEADER_SAMPLE, LEADER_REWARD, FOLLOWER_REWARD)
                  ) -> Dict[str, RngStream]:
    """Named, mutually independent substreams of one root seed."""
    return {name: RngStream(seed, name) for name in names}

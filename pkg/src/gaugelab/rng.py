"""Seeded, stream-addressable random number generation.

Every stochastic component owns an RngStream identified by (master seed,
stream id).  Identical pairs reproduce identical output; distinct stream
ids give statistically independent streams (PCG64 seeded through a
SeedSequence with the stream id as spawn key).  The full generator state
is serializable so chains can checkpoint and resume bit-identically.
"""

from __future__ import annotations

import numpy as np


class RngStream:
    """A reproducible random stream: (seed, stream) -> PCG64 generator."""

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        self._bitgen = np.random.PCG64(ss)
        self.gen = np.random.Generator(self._bitgen)

    def spawn(self, stream: int) -> "RngStream":
        """Independent stream under the same master seed."""
        return RngStream(self.seed, stream)

    # -- thin scalar/array helpers used by the samplers -------------------

    def random(self):
        return self.gen.random()

    def uniform(self, low: float, high: float, size=None):
        return self.gen.uniform(low, high, size=size)

    def normal(self, size=None):
        return self.gen.standard_normal(size)

    def complex_normal(self, size=None):
        return self.gen.standard_normal(size) + 1j * self.gen.standard_normal(size)

    def integers(self, n: int, size=None):
        return self.gen.integers(0, n, size=size)

    # -- checkpointing -----------------------------------------------------

    def state(self) -> dict:
        """JSON-serializable snapshot (seed, stream, bit-generator state)."""
        st = self._bitgen.state
        return {
            "seed": self.seed,
            "stream": self.stream,
            "pcg64_state": str(st["state"]["state"]),
            "pcg64_inc": str(st["state"]["inc"]),
            "has_uint32": int(st["has_uint32"]),
            "uinteger": int(st["uinteger"]),
        }

    def set_state(self, snap: dict) -> None:
        self.seed = int(snap["seed"])
        self.stream = int(snap["stream"])
        self._bitgen.state = {
            "bit_generator": "PCG64",
            "state": {
                "state": int(snap["pcg64_state"]),
                "inc": int(snap["pcg64_inc"]),
            },
            "has_uint32": int(snap["has_uint32"]),
            "uinteger": int(snap["uinteger"]),
        }

    @staticmethod
    def from_state(snap: dict) -> "RngStream":
        rng = RngStream(int(snap["seed"]), int(snap["stream"]))
        rng.set_state(snap)
        return rng

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream={self.stream})"

"""Keyed random streams.

Every stream is addressed by ``(seed, stream_id)``. The pair is hashed with
:class:`numpy.random.SeedSequence` (``stream_id`` goes in the spawn key) and
drives a Philox counter-based bit generator. Normal variates come from
numpy's ziggurat sampler (``Generator.standard_normal``). Both choices are
fixed: changing either changes every simulated number.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from inferlab.errors import DomainError

UINT64_MAX = 2**64 - 1


def check_uint64(value, name: str = "seed") -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if not 0 <= value <= UINT64_MAX:
        raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value}")
    return value


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seed", check_uint64(self.seed, "seed"))
        object.__setattr__(self, "stream_id", check_uint64(self.stream_id, "stream_id"))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(ss))


def standard_normal_draws(stream: RngStream, count: int) -> np.ndarray:
    """The first ``count`` standard normal variates of ``stream``."""
    if count < 0:
        raise DomainError(f"count must be >= 0, got {count}")
    return stream.generator().standard_normal(count)

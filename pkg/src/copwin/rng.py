"""SplitMix64 stream and seed derivation.

Fixed here (rather than delegated to :mod:`random` or numpy) so that every
sampled graph is bit-identical across platforms and library versions.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def scramble(z: int) -> int:
    """SplitMix64 output mixing function."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return scramble(self.state)


def derive_seed(seed: int, index: int) -> int:
    """Seed for trial ``index`` of a run seeded with ``seed``.

    The two 64-bit words are absorbed in order: the first SplitMix64 output of
    ``seed`` is XOR-ed with ``index`` and the result is stepped once more.
    """
    first = SplitMix64(seed).next()
    return SplitMix64(first ^ (index & MASK64)).next()

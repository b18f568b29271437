"""Counter-based 64-bit pseudo-random stream for reproducible instance generation.

Instance generation must be a pure function of its seed and produce the same
bytes on every platform, so we avoid library RNGs whose streams may change
between versions.  The generator here is a counter construction over the
splitmix64 finalizer: output k is ``mix(key + (k + 1) * GOLDEN)`` where
``key = mix(seed)``.  Uniform doubles take the top 53 bits of an output word.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(x: int) -> int:
    """splitmix64 finalizer on a 64-bit word."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class CounterStream:
    """Deterministic stream of 64-bit words addressed by an advancing counter.

    Two streams built from the same seed yield identical sequences; the k-th
    word depends only on (seed, k), so generation never depends on call order
    history beyond the number of draws taken.
    """

    def __init__(self, seed: int):
        self._key = _mix(seed & _MASK64)
        self._counter = 0

    def next_u64(self) -> int:
        self._counter += 1
        return _mix((self._key + self._counter * _GOLDEN) & _MASK64)

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform_in(self, lo: float, hi: float) -> float:
        """Uniform double in [lo, hi)."""
        return lo + self.uniform() * (hi - lo)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the inclusive range [lo, hi].

        Derived from a 53-bit uniform; the scaling bias is below 2**-53 per
        value, which is irrelevant for benchmark data but keeps the draw a
        single word, making streams easy to reason about.
        """
        span = hi - lo + 1
        if span <= 0:
            raise ValueError(f"empty integer range [{lo}, {hi}]")
        return lo + int(self.uniform() * span)

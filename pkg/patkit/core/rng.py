"""Counter-based random streams.

A stream is identified by ``(seed, counter)``: ``counter`` counts the raw
64-bit words already consumed from a Philox generator keyed by ``seed``,
so the same pair always continues with the same draws on every platform.
"""

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_WORDS_PER_BLOCK = 4
_TWO_POW_53 = float(1 << 53)


class RngStream:
    def __init__(self, seed: int, counter: int = 0):
        self.seed = int(seed) & _MASK64
        self._start = int(counter)
        self._consumed = 0
        self._bits = np.random.Philox(key=self.seed)
        blocks, remainder = divmod(self._start, _WORDS_PER_BLOCK)
        if blocks:
            self._bits.advance(blocks)
        if remainder:
            self._bits.random_raw(remainder)

    @property
    def counter(self) -> int:
        return self._start + self._consumed

    def child(self, stream_id: int) -> 'RngStream':
        """Independent stream for parallel work: seed XOR stream id."""
        return RngStream(self.seed ^ (int(stream_id) & _MASK64))

    def raw(self, n: int) -> np.ndarray:
        self._consumed += n
        if n == 0:
            return np.zeros(0, dtype=np.uint64)
        return np.asarray(self._bits.random_raw(n), dtype=np.uint64)

    def uniform(self, n: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        """Draws in [low, high) with 53 bits of resolution."""
        unit = (self.raw(n) >> np.uint64(11)).astype(np.float64) / _TWO_POW_53
        return low + (high - low) * unit

    def integers(self, n: int, low: int, high: int) -> np.ndarray:
        """Draws in [low, high)."""
        return np.minimum(low + np.floor(self.uniform(n) * (high - low)), high - 1).astype(np.int64)

    def scalar(self, low: float = 0.0, high: float = 1.0) -> float:
        return float(self.uniform(1, low, high)[0])

    def integer(self, low: int, high: int) -> int:
        return int(self.integers(1, low, high)[0])

    def __repr__(self):
        return f"RngStream(seed={self.seed}, counter={self.counter})"


def normal_draws(rng: RngStream, n: int, sigma: float) -> np.ndarray:
    """``n`` normal draws with mean 0 and standard deviation ``sigma`` (Box-Muller)."""
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    pairs = math.ceil(n / 2)
    u = rng.uniform(2 * pairs)
    u1 = 1.0 - u[0::2]
    u2 = u[1::2]
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    draws = np.empty(2 * pairs)
    draws[0::2] = radius * np.cos(angle)
    draws[1::2] = radius * np.sin(angle)
    return sigma * draws[:n]

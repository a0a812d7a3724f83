"""Portable deterministic random numbers (SplitMix64).

Sampling and bootstrap results must reproduce bit-for-bit across runs,
platforms and reimplementations, so we pin a small, published generator
instead of relying on a standard library whose streams may change between
versions. SplitMix64 (Steele, Lea & Flood 2014; the generator behind
Java's SplittableRandom) is a 64-bit state machine:

    state  = (state + 0x9E3779B97F4A7C15) mod 2^64
    z      = state
    z      = (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9   mod 2^64
    z      = (z XOR (z >> 27)) * 0x94D049BB133111EB   mod 2^64
    output = z XOR (z >> 31)

Bounded integers use rejection sampling on the top bits so every value in
[0, n) is equally likely. Sampling without replacement is a partial
Fisher-Yates shuffle. Derived streams (for parallel bootstrap resamples)
seed a fresh generator with ``next_u64`` of a generator advanced to the
stream index, see :func:`derive_seed`.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection sampling."""
        if n <= 0:
            raise ValueError("bound must be positive")
        # Reject values in the final partial block of the 2^64 range.
        limit = MASK64 - (MASK64 % n)
        while True:
            v = self.next_u64()
            if v < limit or limit == 0:
                return v % n

    def sample_without_replacement(self, population_size: int, k: int) -> list[int]:
        """First k positions of a Fisher-Yates shuffle of range(population_size)."""
        if k > population_size:
            raise ValueError("sample larger than population")
        items = list(range(population_size))
        for i in range(k):
            j = i + self.below(population_size - i)
            items[i], items[j] = items[j], items[i]
        return items[:k]

    def sample_with_replacement(self, population_size: int, k: int) -> list[int]:
        return [self.below(population_size) for _ in range(k)]


def derive_seed(seed: int, index: int) -> int:
    """Deterministic per-stream seed for stream ``index`` of master ``seed``.

    Defined as the (index+1)-th output of SplitMix64(seed); streams can be
    generated independently and in parallel without sharing state.
    """
    return SplitMix64((seed + (index + 1) * GOLDEN) & MASK64).next_u64()

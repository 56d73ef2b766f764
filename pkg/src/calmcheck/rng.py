"""Seeded deterministic random stream (splitmix64).

The stream is a pure function of the seed and is stable across Python
versions, which keeps sweep reports byte-identical between reruns.
"""

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & _MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def bounded(self, n):
        """Uniform integer in [0, n); rejection sampling, no modulo bias."""
        if n <= 0:
            raise ValueError(f"bounded() needs n >= 1, got {n}")
        threshold = (1 << 64) - ((1 << 64) % n)
        while True:
            value = self.next_u64()
            if value < threshold:
                return value % n

    def chance(self, numerator, denominator):
        return self.bounded(denominator) < numerator

    def shuffle(self, items):
        # Fisher-Yates, in place
        for i in range(len(items) - 1, 0, -1):
            j = self.bounded(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

"""xoshiro256** generator and seed derivation.

The compiled kernels carry a C copy of the same generator; both must produce
identical streams for a given 64-bit seed, which the test-suite checks.
"""

MASK64 = 0xFFFFFFFFFFFFFFFF
ALGORITHM = "xoshiro256** 1.0 (splitmix64 seeding)"


def splitmix64(x):
    """Return (next_state, output) of one splitmix64 step."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return x, z ^ (z >> 31)


def mix64(x):
    return splitmix64(x & MASK64)[1]


def derive_seed(base_seed, class_index, replication_index):
    """Stream seed for one (start class, replication) batch."""
    h = mix64(base_seed)
    h = mix64(h ^ (class_index & MASK64))
    h = mix64(h ^ ((replication_index * 0xD1B54A32D192ED03) & MASK64))
    return h


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    """xoshiro256** with a 2**256 - 1 period."""

    def __init__(self, seed):
        x = seed & MASK64
        s = []
        for _ in range(4):
            x, z = splitmix64(x)
            s.append(z)
        self.s = s

    def next_u64(self):
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self):
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

import os

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "..", "data", "fixtures")


def fixture(*parts):
    return os.path.join(FIXTURES, *parts)


MASK64 = (1 << 64) - 1


class MT19937_64:
    """Textbook 64-bit Mersenne Twister (Matsumoto & Nishimura 2004 reference code)."""

    def __init__(self, seed):
        self.mt = [0] * 312
        self.mt[0] = seed & MASK64
        for i in range(1, 312):
            self.mt[i] = (6364136223846793005 * (self.mt[i - 1] ^ (self.mt[i - 1] >> 62)) + i) & MASK64
        self.idx = 312

    def _twist(self):
        upper, lower = 0xFFFFFFFF80000000, 0x7FFFFFFF
        for i in range(312):
            x = (self.mt[i] & upper) | (self.mt[(i + 1) % 312] & lower)
            xa = x >> 1
            if x & 1:
                xa ^= 0xB5026F5AA96619E9
            self.mt[i] = self.mt[(i + 156) % 312] ^ xa
        self.idx = 0

    def next(self):
        if self.idx >= 312:
            self._twist()
        x = self.mt[self.idx]
        self.idx += 1
        x ^= (x >> 29) & 0x5555555555555555
        x ^= (x << 17) & 0x71D67FFFEDA60000
        x ^= (x << 37) & 0xFFF7EEE000000000
        x ^= x >> 43
        return x & MASK64


class Stream:
    """Bounded draws, shuffle and sampling as documented for the C++ Prng."""

    def __init__(self, seed):
        self.eng = MT19937_64(seed)

    def below(self, n):
        threshold = ((1 << 64) - n) % n
        r = self.eng.next()
        while r < threshold:
            r = self.eng.next()
        return r % n

    def sample_indices(self, n, k):
        idx = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            idx[i], idx[j] = idx[j], idx[i]
        return idx[:k]

    def shuffle(self, items):
        for i in range(len(items), 1, -1):
            j = self.below(i)
            items[i - 1], items[j] = items[j], items[i - 1]

"""Paired bootstrap p-value with a re-implementation of the documented resampling stream."""
from common import Stream, fixture


def read(path):
    rows = [l.split("\t") for l in open(path).read().split("\n")[1:] if l]
    return [float(r[1]) for r in rows]


def bootstrap(a, b, n_resamples, seed):
    d = [x - y for x, y in zip(a, b)]
    if not sum(d) > 0:
        return 1.0
    s = Stream(seed)
    n = len(d)
    bad = 0
    for _ in range(n_resamples):
        tot = 0.0
        for _ in range(n):
            tot += d[s.below(n)]
        if tot <= 0:
            bad += 1
    return bad / n_resamples


a = read(fixture("scores", "system_a.tsv"))
b = read(fixture("scores", "system_b.tsv"))
print("system_a vs system_b seed 42 n 1000 p", repr(bootstrap(a, b, 1000, 42)))
print("system_a vs system_b seed 7 n 500 p", repr(bootstrap(a, b, 500, 7)))
print("mean_a", repr(sum(a) / len(a)), "mean_b", repr(sum(b) / len(b)))

# Borderline case: only the first 12 items, where the systems are close.
for k in (8, 12, 20):
    print("first", k, "seed 42 n 1000 p", repr(bootstrap(a[:k], b[:k], 1000, 42)),
          "sum diff", repr(sum(x - y for x, y in zip(a[:k], b[:k]))))

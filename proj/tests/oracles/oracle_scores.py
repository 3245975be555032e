"""awk-style running sum of the external score fixture."""
from common import fixture

n = 0
total = 0.0
for line in open(fixture("scores", "comet_1012.tsv")):
    f = line.rstrip("\n").split("\t")
    n += 1
    total += float(f[1])
print("comet_1012 n", n, "mean", repr(total / n))

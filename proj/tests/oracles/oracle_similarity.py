"""Mean cosine of the five hand-specified pairs mapped to (0, 1)."""
import json
import math
from common import fixture

vecs = {}
for line in open(fixture("embeddings", "five_pairs.jsonl")):
    r = json.loads(line)
    vecs[(r["lang"], r["sentence_id"])] = r["vector"]
cos = []
for i in range(5):
    a, b = vecs[("zh", i)], vecs[("en", i)]
    dot = sum(x * y for x, y in zip(a, b))
    cos.append(dot / (math.sqrt(sum(x * x for x in a)) * math.sqrt(sum(y * y for y in b))))
mean = sum(cos) / len(cos)
print("five_pairs cosines", [repr(c) for c in cos])
print("five_pairs gamma", repr(min(max((mean + 1) / 2, 1e-3), 1 - 1e-3)))

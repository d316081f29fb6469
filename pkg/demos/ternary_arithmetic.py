"""
Bitsliced arithmetic over F3
============================

Each trit is split over two bit planes, so 64 trits are added with a
handful of word operations.
"""
import numpy as np

from wavelet.f3core import TritVector, to_compact, weight

a = TritVector.from_trits([0, 1, 2, 2, 1, 0, 2])
b = TritVector.from_trits([1, 1, 1, 2, 0, 0, 2])

print("a     ", a.to_trits())
print("b     ", b.to_trits())
print("a + b ", (a + b).to_trits())
print("a - b ", (a - b).to_trits())
print("-a    ", (-a).to_trits())
print("|a| =", weight(a))

# the planes behind a
print("high plane", bin(int(a.high[0])), "low plane", bin(int(a.low[0])))

# 5 trits per byte for storage
v = TritVector.from_trits(np.random.default_rng(0).integers(0, 3, 5605))
print(v.length, "trits ->", len(to_compact(v)), "bytes")

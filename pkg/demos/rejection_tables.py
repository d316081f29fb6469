"""
The rejection tables
====================

f_V decides whether a V-stage weight t is kept; f_U(., t) does the same
for the count of weight-one pairs.  Both are 128-bit fixed point.
"""
from wavelet.params import ONE, SUPERTUBOS, tables_for

tables = tables_for(SUPERTUBOS)
print("V acceptance per round:", float(tables.acceptance_v()))

best = max(tables.f_V, key=tables.f_V.get)
print("f_V peaks at t =", best)
for t in (1953, 2100, best, 2600, 2745):
    print(f"  f_V({t}) = {tables.f_V.get(t, 0) / ONE:.6f}")

row = tables.f_U[best]
print(len(row), "nonzero f_U entries at t =", best, "for s in", min(row), "..", max(row))

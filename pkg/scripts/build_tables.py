"""Build the rejection tables shipped for the 128-bit parameter set.

p_V is a discretised Gaussian over the weight of x'_V.  For each t,
p_U(., t) is a discretised Gaussian in k whose centre and width were
fitted (Nelder-Mead, on a grid of t) to maximise the worst-case
acceptance of the U stage; centre and width are then smoothed by a
quadratic in t.  The acceptance tables are computed exactly from these
inputs by wavelet.params.compute_rejection_tables.

Usage: python scripts/build_tables.py [out_path]
"""
import math
import sys
import time

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammaln, logsumexp

from wavelet.params import (FRAC_BITS, ONE, SUPERTUBOS, Categorical,
                            compute_rejection_tables, default_table_path,
                            dump_tables)

P = SUPERTUBOS
V_MEAN, V_VAR = 835.839, 480.0
FIT_GRID = range(P.t_min, P.t_max + 1, 66)
LN2 = math.log(2)


def logcomb(a, b):
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    bad = (b < 0) | (b > a) | (a < 0)
    val = gammaln(a + 1) - gammaln(np.clip(b, 0, None) + 1) - gammaln(np.clip(a - b, 0, None) + 1)
    return np.where(bad, -np.inf, val)


def gaussian_weights(lo, hi, mean, sd):
    """Fixed-point weights summing to exactly 2^128, dropping entries below 2^-128.

    The exact sum makes the stored values reload bit for bit, so the
    acceptance tables can be recomputed from the file alone."""
    x = np.arange(lo, hi + 1)
    lw = -(x - mean) ** 2 / (2 * sd * sd)
    lw -= logsumexp(lw)
    out = {}
    for xi, l in zip(x, lw):
        v = int(math.exp(l) * ONE) if l > -FRAC_BITS * LN2 else 0
        if v:
            out[int(xi)] = v
    peak = max(out, key=out.get)
    out[peak] += ONE - sum(out.values())
    return out


def u_setup(t):
    n, w, h = P.n, P.w, P.half
    s = np.arange(w % 2, min(t, n - w) + 1, 2).astype(float)
    lu = logcomb(t, s) + logcomb(h - t, (w + s) / 2 - t) + 1.5 * s * LN2
    lu -= logsumexp(lu)
    klo, khi = P.k_range(t)
    ks = np.arange(klo, khi + 1).astype(float)
    k0 = P.kU_free - ks
    L = (logcomb((t - ks)[:, None], s[None, :])
         + logcomb((h - t - k0)[:, None], (w + s[None, :]) / 2 - t - k0[:, None])
         + 1.5 * s[None, :] * LN2)
    L -= logsumexp(L, axis=1, keepdims=True)
    return lu, ks, L


def worst_ratio(x, lu, ks, L):
    lp = -(ks - x[0]) ** 2 / (2 * math.exp(2 * x[1]))
    lp -= logsumexp(lp)
    mix = logsumexp(lp[:, None] + L, axis=0)
    keep = lu > -FRAC_BITS * LN2
    return (lu - mix)[keep].max()


def fit_u():
    ts, mus, sds = [], [], []
    for t in FIT_GRID:
        lu, ks, L = u_setup(t)
        mean_target = (np.exp(lu) * np.arange(len(lu))).sum()
        start = ks[np.argmin([abs((np.exp(l) * np.arange(len(l))).sum() - mean_target) for l in L])]
        res = minimize(worst_ratio, [start, math.log(9.0)], args=(lu, ks, L), method="Nelder-Mead",
                       options={"xatol": 1e-4, "fatol": 1e-8, "maxiter": 2000})
        ts.append(t)
        mus.append(res.x[0])
        sds.append(math.exp(res.x[1]))
        print(f"  t={t}: centre {res.x[0]:.3f} width {sds[-1]:.3f} acceptance {math.exp(-res.fun):.4f}")
    return np.polyfit(ts, mus, 2), np.polyfit(ts, sds, 2)


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else default_table_path(P)
    t0 = time.time()
    p_V = Categorical(gaussian_weights(0, P.kV_free, V_MEAN, math.sqrt(V_VAR)))
    print("fitting p_U")
    cmu, csd = fit_u()
    p_U = {}
    for t in range(P.t_min, P.t_max + 1):
        klo, khi = P.k_range(t)
        p_U[t] = Categorical(gaussian_weights(klo, khi, np.polyval(cmu, t), np.polyval(csd, t)))
    print("computing acceptance tables")

    def progress(t):
        if t % 50 == 0:
            print(f"  t={t} ({time.time() - t0:.0f}s)", flush=True)

    tables = compute_rejection_tables(P, p_V, p_U, progress=progress)
    dump_tables(tables, out)
    print(f"wrote {out} in {time.time() - t0:.0f}s")


if __name__ == "__main__":
    main()

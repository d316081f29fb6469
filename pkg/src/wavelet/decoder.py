"""The trapdoor decoder for the UV parity-check matrix.

Given a syndrome x of length n-k, produce e of weight w with
e . H_sk^T = x.  The V half is solved first with a free choice of
weight, then the U half is solved so that the combined error reaches
weight exactly w; two rejection steps shape the output distribution.
"""
from dataclasses import dataclass

import numpy as np

from .f3core import TritVector, random_trit_array
from .f3linalg import apply_perm_inv, fisher_yates, free_set, shuffle
from .params import (RejectionTables, TableDomainError, compute_rejection_tables,  # noqa: F401
                     q1, q1_unif, q2, q2_unif)

MAX_ROUNDS = 10 ** 6
# toy sets have tiny d, so some (k_nonzero, FreeSetU) draws admit no
# weight-w completion at all; their inner loop is abandoned after this many
# tries and a new k_nonzero is drawn
TOY_INNER_LIMIT = 200
# the same sets can also meet a V solution for which no U information set
# exists or none completes; after this many U rounds the V stage is redrawn
TOY_U_LIMIT = 50
# cap on elimination restarts for one FreeSet draw
MAX_RESTARTS = 1000


class DecodeFailure(RuntimeError):
    pass


@dataclass
class DecodeStats:
    v_rounds: int = 0
    v_restarts: int = 0
    u_rounds: int = 0
    inner_rounds: int = 0
    t: int = 0
    k_nonzero: int = 0
    ell: int = 0
    m1: int = 0


def m1(e, half):
    """Number of pairs (e_i, e_{half+i}) with exactly one nonzero entry."""
    t = e.to_trits() if isinstance(e, TritVector) else np.asarray(e)
    return int(np.count_nonzero((t[:half] != 0) ^ (t[half:2 * half] != 0)))


def random_positions(rng, n, count):
    """count distinct indices of range(n), uniformly (partial shuffle)."""
    idx = np.arange(n, dtype=np.int64)
    for i in range(count):
        j = i + rng.uniform_below(n - i)
        idx[i], idx[j] = idx[j], idx[i]
    return idx[:count]


def random_weight_trits(rng, length, count):
    out = np.zeros(length, np.uint8)
    pos = random_positions(rng, length, count)
    out[pos] = random_trit_array(rng, count, exclude_zero=True)
    return out


def rand_perm_set(n, k_nonzero, idx, rng):
    """Uniform permutation whose first t - k_nonzero entries lie in idx, whose
    next n - t entries are the complement of idx, and whose last k_nonzero
    entries are the rest of idx."""
    idx = np.asarray(idx, dtype=np.int64)
    t = idx.size
    if not 0 <= k_nonzero <= t <= n:
        raise ValueError("need 0 <= k_nonzero <= |idx| <= n")
    mask = np.zeros(n, bool)
    mask[idx] = True
    inside = shuffle(rng, idx)
    outside = shuffle(rng, np.flatnonzero(~mask))
    return np.concatenate([inside[:t - k_nonzero], outside, inside[t - k_nonzero:]])


def free_set_v(R_V, s, rng, max_nonpivot, max_restarts=MAX_RESTARTS):
    """Eliminate (I | R_V) || s along uniform permutations until at most
    max_nonpivot nonpivots are met.  Returns (None, restarts) when every
    try fails."""
    h = R_V.rows + R_V.cols
    for restarts in range(max_restarts):
        res = free_set(R_V.high, R_V.low, R_V.cols, s, fisher_yates(rng, h), max_nonpivot)
        if res is not None:
            return res, restarts
    return None, max_restarts


def free_set_u(k_nonzero, support, R_U, s, rng, max_nonpivot, max_restarts=MAX_RESTARTS):
    h = R_U.rows + R_U.cols
    for restarts in range(max_restarts):
        perm = rand_perm_set(h, k_nonzero, support, rng)
        res = free_set(R_U.high, R_U.low, R_U.cols, s, perm, max_nonpivot)
        if res is not None:
            return res, restarts
    return None, max_restarts


def decode(x, sk, tables, rng, max_rounds=MAX_ROUNDS, stats=None, inner_limit=None):
    """Return e with |e| = w and e . H_sk^T = x."""
    if inner_limit is None and tables.always_accept:
        inner_limit = TOY_INNER_LIMIT
    p = sk.params
    h, w, d = p.half, p.w, p.d
    if x.length != p.r:
        raise ValueError(f"syndrome length {x.length} != {p.r}")
    if tables.params != p:
        raise ValueError("rejection tables belong to another parameter set")
    st = stats if stats is not None else DecodeStats()
    a, b, c, dd = sk.diagonals()
    det = (a * dd - b * c) % 3
    if np.any(det == 0) or np.any(a == 0) or np.any(c == 0):
        raise ValueError("secret key violates a, c != 0 and ad != bc")
    # the combined error is scaled by det^-1 == det so that its syndrome
    # under H_sk is exactly (e_U H_U^T, e_V H_V^T)
    both_nonzero = (a * b + c * dd) % 3
    xt = x.to_trits()
    s_U = TritVector.from_trits(xt[:p.rows_U])
    s_V = TritVector.from_trits(xt[p.rows_U:])

    u_limit = TOY_U_LIMIT if inner_limit is not None else None
    while True:
        e_V, t = _v_stage(sk, s_V, tables, rng, max_rounds, st)
        support = np.flatnonzero(e_V)
        e_V = e_V.astype(np.int64)
        part1 = b * e_V
        part2 = dd * e_V
        u_tries = 0
        while u_limit is None or u_tries < u_limit:
            u_tries += 1
            st.u_rounds += 1
            if st.u_rounds > max_rounds:
                raise DecodeFailure("U stage did not finish within the round cap")
            k_nz = tables.sample_u(t, rng)
            fs, _ = free_set_u(k_nz, support, sk.R_U, s_U, rng, d)
            if fs is None:
                continue
            tail = fs.pi[h - k_nz:]
            x_u_forced = ((both_nonzero[tail] * e_V[tail]) % 3).astype(np.uint8)
            tries = 0
            found = False
            while inner_limit is None or tries < inner_limit:
                tries += 1
                st.inner_rounds += 1
                if st.inner_rounds > max_rounds:
                    raise DecodeFailure("no weight-w solution within the round cap")
                x_u = random_trit_array(rng, d)
                x_u_free = random_trit_array(rng, p.kU_free - k_nz, exclude_zero=True)
                e_U = apply_perm_inv(fs.pi, fs.solve(np.concatenate([x_u, x_u_free, x_u_forced])))
                e_U = e_U.astype(np.int64)
                left = ((a * e_U + part1) * det) % 3
                right = ((c * e_U + part2) * det) % 3
                nz_l = left != 0
                nz_r = right != 0
                if int(nz_l.sum() + nz_r.sum()) == w:
                    found = True
                    break
            if not found:
                continue
            st.t = t
            st.k_nonzero = k_nz
            st.m1 = int(np.count_nonzero(nz_l ^ nz_r))
            if tables.accept_u(st.m1, t, rng):
                return TritVector.from_trits(np.concatenate([left, right]).astype(np.uint8))


def _v_stage(sk, s_V, tables, rng, max_rounds, st):
    """Draw e_V with e_V . H_V^T = s_V until the V rejection step accepts."""
    p = sk.params
    while True:
        st.v_rounds += 1
        if st.v_rounds > max_rounds:
            raise DecodeFailure("V stage did not accept within the round cap")
        ell = tables.sample_v(rng)
        x_v = random_trit_array(rng, p.d)
        x_v_free = random_weight_trits(rng, p.kV_free, ell)
        fs, restarts = free_set_v(sk.R_V, s_V, rng, p.d)
        st.v_restarts += restarts
        if fs is None:
            continue
        e_V = apply_perm_inv(fs.pi, fs.solve(np.concatenate([x_v, x_v_free])))
        t = int(np.count_nonzero(e_V))
        if tables.accept_v(t, rng):
            st.t, st.ell = t, ell
            return e_V, t

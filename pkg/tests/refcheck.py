"""Brute-force oracles: plain integers, lists and Fractions only."""
from fractions import Fraction
from itertools import product
from math import comb


def add3(a, b):
    return (a + b) % 3


def sub3(a, b):
    return (a - b) % 3


def naive_syndrome(e, H):
    """e . H^T with H a list of rows."""
    return [sum(x * y for x, y in zip(e, row)) % 3 for row in H]


def naive_matmul(A, B):
    return [[sum(A[i][t] * B[t][j] for t in range(len(B))) % 3 for j in range(len(B[0]))]
            for i in range(len(A))]


def transpose(A):
    return [list(r) for r in zip(*A)]


def naive_rank(H):
    """Rank over F3 by textbook elimination."""
    M = [list(r) for r in H]
    rank = 0
    cols = len(M[0]) if M else 0
    for c in range(cols):
        p = next((i for i in range(rank, len(M)) if M[i][c]), None)
        if p is None:
            continue
        M[rank], M[p] = M[p], M[rank]
        inv = M[rank][c]  # 1 or 2 are self-inverse
        M[rank] = [(v * inv) % 3 for v in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][c]:
                f = M[i][c]
                M[i] = [(x - f * y) % 3 for x, y in zip(M[i], M[rank])]
        rank += 1
    return rank


def naive_rref_steps(H, order, rows_needed=None):
    """Eliminate along `order`; returns (matrix, pivots, nonpivots)."""
    M = [list(r) for r in H]
    R = len(M) if rows_needed is None else rows_needed
    r = 0
    piv, non = [], []
    for c in order:
        if r == R:
            break
        p = next((i for i in range(r, len(M)) if M[i][c]), None)
        if p is None:
            non.append(c)
            continue
        if M[p][c] == 2:
            M[p] = [(-v) % 3 for v in M[p]]
        M[r], M[p] = M[p], M[r]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(x - f * y) % 3 for x, y in zip(M[i], M[r])]
        piv.append(c)
        r += 1
    return M, piv, non


def naive_parity_check_uv(RU, RV, a, b, c, d):
    h = len(a)
    ru, rv = len(RU), len(RV)
    HU = [[1 if j == i else 0 for j in range(ru)] + list(RU[i]) for i in range(ru)]
    HV = [[1 if j == i else 0 for j in range(rv)] + list(RV[i]) for i in range(rv)]
    top = [[HU[i][j] * d[j] % 3 for j in range(h)] + [(-HU[i][j] * b[j]) % 3 for j in range(h)]
           for i in range(ru)]
    bot = [[(-HV[i][j] * c[j]) % 3 for j in range(h)] + [HV[i][j] * a[j] % 3 for j in range(h)]
           for i in range(rv)]
    return top + bot


def s_hat(s):
    k = len(s)
    out = []
    for i in range(0, k - 1, 2):
        out += [(s[i] + s[i + 1]) % 3, (s[i] - s[i + 1]) % 3]
    if k % 2:
        out.append(s[-1])
    return out


def weight(v):
    return sum(1 for x in v if x)


def weight_identity_rhs(s):
    """(3/2)(k + eps) - 3 delta, delta = all-zero pairs, eps = odd-tail sign."""
    k = len(s)
    m = k // 2 * 2
    delta = sum(1 for i in range(0, m, 2) if s[i] == 0 and s[i + 1] == 0)
    eps = 0 if k % 2 == 0 else (1 if s[-1] else -1)
    return Fraction(3, 2) * (k + eps) - 3 * delta


def weight_identity_rhs_corrected(s):
    """Same closed form, but a nonzero odd tail adds 2 rather than 3."""
    k = len(s)
    m = k // 2 * 2
    delta = sum(1 for i in range(0, m, 2) if s[i] == 0 and s[i + 1] == 0)
    tail = 2 if k % 2 and s[-1] else 0
    return Fraction(3 * m, 2) + tail - 3 * delta


def weight_identity_failures(k, rhs=weight_identity_rhs):
    """Check |s_hat| + |s| against a closed form for all 3^k vectors.

    Returns the number of vectors where the identity fails."""
    bad = 0
    for s in product(range(3), repeat=k):
        s = list(s)
        if weight(s_hat(s)) + weight(s) != rhs(s):
            bad += 1
    return bad


# ---------------------------------------------------------------------------
# exact rejection-table formulas, straight from the definitions

def q1_unif(n, w, i):
    """Probability that a uniform weight-w error has i nonzero V coordinates (w even)."""
    h = n // 2
    tot = 0
    for p in range(0, i + 1, 2):
        j = (w + p) // 2 - i
        if 0 <= j <= h - i:
            tot += comb(i, p) * comb(h - i, j) * 2 ** (3 * p // 2)
    return Fraction(comb(h, i) * tot, comb(n, w) * 2 ** (w // 2))


def q1(n, kv_free, p_V, i):
    """p_V: dict l -> Fraction."""
    nv = n // 2 - kv_free
    return sum((Fraction(comb(nv, i - l) * 2 ** (i - l), 3 ** nv) * pl
                for l, pl in p_V.items() if 0 <= i - l <= nv), Fraction(0))


def q2_unif(n, w, s, t):
    h = n // 2

    def term(p):
        j = (w + p) // 2 - t
        if (p - w) % 2 or p > t or p > n - w or j < 0 or j > h - t:
            return 0
        return comb(t, p) * comb(h - t, j) * 2 ** (3 * p // 2)
    z = sum(term(p) for p in range(0, n + 1))
    return Fraction(term(s), z)


def q2(n, w, ku_free, p_U_t, s, t):
    """p_U_t: dict k -> Fraction."""
    h = n // 2
    total = Fraction(0)
    for k, pk in p_U_t.items():
        k0 = ku_free - k

        def term(p):
            j = (w + p) // 2 - t - k0
            if (p - w) % 2 or p > t - k or p > n - w or j < 0 or j > h - t - k0 or h - t - k0 < 0:
                return 0
            return comb(t - k, p) * comb(h - t - k0, j) * 2 ** (3 * p // 2)
        z = sum(term(p) for p in range(0, n + 1))
        if z:
            total += pk * Fraction(term(s), z)
    return total


# ---------------------------------------------------------------------------
# prefix codes

def naive_mr_decode(bits, codebook, count):
    """Walk the bit string, growing a prefix until it matches a codeword."""
    inv = {code: sym for sym, code in codebook}
    out = []
    cur = ""
    pos = 0
    while len(out) < count and pos < len(bits):
        cur += bits[pos]
        pos += 1
        if cur in inv:
            out.append(inv[cur])
            cur = ""
    return out, pos

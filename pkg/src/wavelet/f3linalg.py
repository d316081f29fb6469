"""Matrices over F3 stored as bitsliced rows, elimination, permutations."""
import numpy as np
from numba import njit

from .f3core import (WORD_BITS, TritVector, add_words, n_words, neg_words,
                     pack_bits, sub_words, words_to_trits)

_U64 = np.uint64


class TritMatrix:
    """rows x cols matrix; row i lives in high[i], low[i] (uint64 words)."""

    __slots__ = ("rows", "cols", "high", "low")

    def __init__(self, rows, cols, high=None, low=None):
        self.rows = int(rows)
        self.cols = int(cols)
        nw = n_words(cols)
        self.high = np.zeros((rows, nw), _U64) if high is None else high
        self.low = np.zeros((rows, nw), _U64) if low is None else low

    @classmethod
    def from_trits(cls, arr):
        a = np.asarray(arr, dtype=np.uint8)
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        if a.size and a.max() > 2:
            raise ValueError("trit values must be in {0,1,2}")
        return cls(a.shape[0], a.shape[1], pack_bits(a == 2), pack_bits(a != 0))

    @classmethod
    def from_rows(cls, rows, cols=None):
        rows = list(rows)
        if cols is None:
            cols = rows[0].length
        m = cls(len(rows), cols)
        for i, r in enumerate(rows):
            if r.length != cols:
                raise ValueError("row length mismatch")
            m.high[i] = r.high
            m.low[i] = r.low
        return m

    def to_trits(self):
        if self.rows == 0:
            return np.zeros((0, self.cols), np.uint8)
        return words_to_trits(self.high, self.low, self.cols)

    def copy(self):
        return TritMatrix(self.rows, self.cols, self.high.copy(), self.low.copy())

    def row(self, i):
        return TritVector(self.cols, self.high[i].copy(), self.low[i].copy())

    def set_row(self, i, v):
        if v.length != self.cols:
            raise ValueError("row length mismatch")
        self.high[i] = v.high
        self.low[i] = v.low

    def get(self, i, j):
        w, b = divmod(j, WORD_BITS)
        h = int(self.high[i, w] >> _U64(b)) & 1
        l = int(self.low[i, w] >> _U64(b)) & 1
        return 2 if h else l

    def set(self, i, j, value):
        w, b = divmod(j, WORD_BITS)
        bit = _U64(1) << _U64(b)
        self.high[i, w] &= ~bit
        self.low[i, w] &= ~bit
        if value:
            self.low[i, w] |= bit
        if value == 2:
            self.high[i, w] |= bit

    def transpose(self):
        return TritMatrix.from_trits(self.to_trits().T)

    def select_columns(self, cols):
        return TritMatrix.from_trits(self.to_trits()[:, np.asarray(cols, dtype=np.int64)])

    def nbytes(self):
        return self.high.nbytes + self.low.nbytes

    def __eq__(self, other):
        return (isinstance(other, TritMatrix) and self.rows == other.rows
                and self.cols == other.cols and np.array_equal(self.high, other.high)
                and np.array_equal(self.low, other.low))

    def __repr__(self):
        return f"TritMatrix({self.rows}x{self.cols})"


def identity(size):
    return TritMatrix.from_trits(np.eye(size, dtype=np.uint8))


def hstack(*ms):
    return TritMatrix.from_trits(np.hstack([m.to_trits() for m in ms]))


# ---------------------------------------------------------------------------
# products

def dot_rows(high, low, vh, vl):
    """Per-row dot products of a bitsliced matrix with one vector, as uint8 trits."""
    l = low & vl
    h = (high ^ vh) & l
    twos = np.bitwise_count(h).sum(axis=-1, dtype=np.int64)
    ones = np.bitwise_count(l).sum(axis=-1, dtype=np.int64) - twos
    return ((ones + 2 * twos) % 3).astype(np.uint8)


def syndrome_mul(e, H):
    """e . H^T"""
    if e.length != H.cols:
        raise ValueError(f"vector length {e.length} != matrix columns {H.cols}")
    if H.rows == 0:
        return TritVector.zeros(0)
    return TritVector.from_trits(dot_rows(H.high, H.low, e.high, e.low))


def vec_mat(x, M):
    """x . M (x has one trit per row of M)."""
    if x.length != M.rows:
        raise ValueError("dimension mismatch")
    xt = x.to_trits()
    hi = np.zeros(M.high.shape[1], _U64)
    lo = np.zeros(M.high.shape[1], _U64)
    for i in np.flatnonzero(xt):
        if xt[i] == 1:
            hi, lo = add_words(hi, lo, M.high[i], M.low[i])
        else:
            hi, lo = sub_words(hi, lo, M.high[i], M.low[i])
    return TritVector(M.cols, hi, lo)


# ---------------------------------------------------------------------------
# permutations

def apply_perm(pi, v):
    """out_i = v_{pi(i)}; coordinates beyond len(pi) are kept."""
    t = v.to_trits() if isinstance(v, TritVector) else np.asarray(v)
    pi = np.asarray(pi, dtype=np.int64)
    out = np.concatenate([t[pi], t[pi.size:]])
    return TritVector.from_trits(out) if isinstance(v, TritVector) else out


def apply_perm_inv(pi, v):
    t = v.to_trits() if isinstance(v, TritVector) else np.asarray(v)
    pi = np.asarray(pi, dtype=np.int64)
    out = t.copy()
    out[pi] = t[:pi.size]
    return TritVector.from_trits(out) if isinstance(v, TritVector) else out


def invert_perm(pi):
    pi = np.asarray(pi, dtype=np.int64)
    inv = np.empty_like(pi)
    inv[pi] = np.arange(pi.size)
    return inv


def is_permutation(pi, size=None):
    pi = np.asarray(pi)
    size = pi.size if size is None else size
    return pi.size == size and np.array_equal(np.sort(pi), np.arange(size))


def fisher_yates(rng, n):
    """Uniform permutation of range(n) drawn from a byte stream."""
    perm = np.arange(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        j = rng.uniform_below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def shuffle(rng, items):
    items = np.asarray(items, dtype=np.int64)
    return items[fisher_yates(rng, items.size)] if items.size else items


# ---------------------------------------------------------------------------
# the UV parity-check matrix

def scale_columns(H, v):
    """H . diag(v)"""
    vt = v.to_trits()
    vh = pack_bits(vt == 2)
    vl = pack_bits(vt != 0)
    l = H.low & vl
    h = (H.high ^ vh) & l
    return TritMatrix(H.rows, H.cols, h, l)


def systematic(R):
    """(I | R)"""
    return hstack(identity(R.rows), R)


def parity_check_uv(R_U, R_V, a, b, c, d):
    """[[H_U D, -H_U B], [-H_V C, H_V A]] with H_U = (I|R_U), H_V = (I|R_V)."""
    half = a.length
    for v in (b, c, d):
        if v.length != half:
            raise ValueError("diagonal vectors must have equal length")
    if R_U.rows + R_U.cols != half or R_V.rows + R_V.cols != half:
        raise ValueError("R_U / R_V shapes do not match n/2")
    HU = systematic(R_U)
    HV = systematic(R_V)
    neg = lambda M: TritMatrix(M.rows, M.cols, *neg_words(M.high, M.low))
    top = np.hstack([scale_columns(HU, d).to_trits(), neg(scale_columns(HU, b)).to_trits()])
    bot = np.hstack([neg(scale_columns(HV, c)).to_trits(), scale_columns(HV, a).to_trits()])
    return TritMatrix.from_trits(np.vstack([top, bot]))


# ---------------------------------------------------------------------------
# elimination

def elim_single(H, r, c):
    """One elimination step on column c, pivot row r; mutates H in place."""
    p = next((i for i in range(r, H.rows) if H.get(i, c)), None)
    if p is None:
        return H, False
    if H.get(p, c) == 2:
        H.high[p], H.low[p] = neg_words(H.high[p], H.low[p])
    if p != r:
        H.high[[p, r]] = H.high[[r, p]]
        H.low[[p, r]] = H.low[[r, p]]
    for i in range(H.rows):
        if i == r:
            continue
        v = H.get(i, c)
        if v == 1:
            H.high[i], H.low[i] = sub_words(H.high[i], H.low[i], H.high[r], H.low[r])
        elif v == 2:
            H.high[i], H.low[i] = add_words(H.high[i], H.low[i], H.high[r], H.low[r])
    return H, True


def gauss_elim_reference(H, pi, rows_needed=None):
    """Column-by-column elimination with elim_single (slow, literal)."""
    H = H.copy()
    R = H.rows if rows_needed is None else rows_needed
    pivots, nonpivots = [], []
    r = 0
    used = 0
    for c in pi:
        if r == R:
            break
        used += 1
        H, found = elim_single(H, r, int(c))
        if found:
            pivots.append(int(c))
            r += 1
        else:
            nonpivots.append(int(c))
    pi = np.asarray(pi, dtype=np.int64)
    new_pi = np.concatenate([np.array(pivots + nonpivots, dtype=np.int64), pi[used:]])
    return H, new_pi, len(pivots), len(nonpivots)


@njit(cache=True)
def _gauss_kernel(hi, lo, perm, R):
    rows, nw = hi.shape
    pivots = np.empty(R, np.int64)
    nonpivots = np.empty(perm.size, np.int64)
    npiv = 0
    nnon = 0
    used = 0
    for idx in range(perm.size):
        if npiv == R:
            break
        used += 1
        c = perm[idx]
        w = c >> 6
        b = np.uint64(c & 63)
        one = np.uint64(1)
        p = -1
        for i in range(npiv, rows):
            if (lo[i, w] >> b) & one:
                p = i
                break
        if p < 0:
            nonpivots[nnon] = c
            nnon += 1
            continue
        if (hi[p, w] >> b) & one:
            for x in range(nw):
                hi[p, x] ^= lo[p, x]
        r = npiv
        if p != r:
            for x in range(nw):
                t = hi[p, x]
                hi[p, x] = hi[r, x]
                hi[r, x] = t
                t = lo[p, x]
                lo[p, x] = lo[r, x]
                lo[r, x] = t
        for i in range(rows):
            if i == r or not ((lo[i, w] >> b) & one):
                continue
            if (hi[i, w] >> b) & one:
                # entry 2: add the pivot row
                for x in range(nw):
                    ah = hi[i, x]
                    al = lo[i, x]
                    bh = hi[r, x]
                    bl = lo[r, x]
                    t = ah ^ bl
                    hi[i, x] = (al ^ bh) & t
                    lo[i, x] = (al ^ bl) | (t ^ bh)
            else:
                for x in range(nw):
                    ah = hi[i, x]
                    al = lo[i, x]
                    bh = hi[r, x]
                    bl = lo[r, x]
                    hi[i, x] = (al ^ (bh ^ bl)) & (ah ^ bl)
                    lo[i, x] = (al ^ bl) | (ah ^ bh)
        pivots[npiv] = c
        npiv += 1
    return pivots[:npiv].copy(), nonpivots[:nnon].copy(), used


def gauss_elim(H, pi, rows_needed=None, reorder=True):
    """Eliminate along the columns listed in pi.

    Returns (matrix, pi', pivot_count).  pi' = pivots || nonpivots || rest.
    With reorder=True the matrix columns are permuted by pi', which puts an
    identity block on the left once full rank is reached; otherwise the
    row-reduced matrix is returned in its original column order.
    """
    R = H.rows if rows_needed is None else rows_needed
    work = H.copy()
    pi = np.ascontiguousarray(pi, dtype=np.int64)
    piv, non, used = _gauss_kernel(work.high, work.low, pi, R)
    new_pi = np.concatenate([piv, non, pi[used:]])
    if reorder:
        work = work.select_columns(np.concatenate([new_pi, np.setdiff1d(np.arange(H.cols), new_pi)]))
    return work, new_pi, piv.size


# ---------------------------------------------------------------------------
# elimination on a systematic matrix with the identity block kept implicit

@njit(cache=True)
def _tableau_kernel(hi, lo, perm, R, max_nonpivot):
    """Eliminate (I | B | s) along perm, storing only (B | s).

    Column c < R is the identity column of row c; column c >= R is slot
    c - R of the tableau.  When a slot column becomes a pivot, the
    displaced identity column takes over its slot.
    """
    rows, nw = hi.shape
    C = perm.size
    one = np.uint64(1)
    row_of = np.full(C, -1, np.int64)
    slot_of = np.full(C, -1, np.int64)
    basis = np.empty(R, np.int64)
    for i in range(R):
        row_of[i] = i
        basis[i] = i
    for c in range(R, C):
        slot_of[c] = c - R
    fixed = np.zeros(R, np.bool_)
    pivots = np.empty(R, np.int64)
    nonpivots = np.empty(C, np.int64)
    coef = np.zeros(rows, np.uint8)
    npiv = 0
    nnon = 0
    used = 0
    for idx in range(C):
        if npiv == R:
            break
        used += 1
        c = perm[idx]
        if row_of[c] >= 0:
            i = row_of[c]
            if not fixed[i]:
                fixed[i] = True
                pivots[npiv] = c
                npiv += 1
                continue
            nonpivots[nnon] = c
            nnon += 1
        else:
            j = slot_of[c]
            w = j >> 6
            b = np.uint64(j & 63)
            p = -1
            for i in range(rows):
                if not fixed[i] and (lo[i, w] >> b) & one:
                    p = i
                    break
            if p < 0:
                nonpivots[nnon] = c
                nnon += 1
                if nnon > max_nonpivot:
                    return pivots[:npiv].copy(), nonpivots[:nnon].copy(), used, row_of, slot_of, False
                continue
            g = 2 if (hi[p, w] >> b) & one else 1
            if g == 2:
                for x in range(nw):
                    hi[p, x] ^= lo[p, x]
            for i in range(rows):
                coef[i] = 0
                if i == p or not ((lo[i, w] >> b) & one):
                    continue
                if (hi[i, w] >> b) & one:
                    coef[i] = 2
                    for x in range(nw):
                        ah = hi[i, x]
                        al = lo[i, x]
                        bh = hi[p, x]
                        bl = lo[p, x]
                        t = ah ^ bl
                        hi[i, x] = (al ^ bh) & t
                        lo[i, x] = (al ^ bl) | (t ^ bh)
                else:
                    coef[i] = 1
                    for x in range(nw):
                        ah = hi[i, x]
                        al = lo[i, x]
                        bh = hi[p, x]
                        bl = lo[p, x]
                        hi[i, x] = (al ^ (bh ^ bl)) & (ah ^ bl)
                        lo[i, x] = (al ^ bl) | (ah ^ bh)
            # slot j now holds the displaced identity column:
            # g on the pivot row, -coef * g elsewhere
            mask = one << b
            for i in range(rows):
                if i == p:
                    v = g
                else:
                    v = (3 - coef[i]) * g % 3 if coef[i] else 0
                hi[i, w] &= ~mask
                lo[i, w] &= ~mask
                if v:
                    lo[i, w] |= mask
                    if v == 2:
                        hi[i, w] |= mask
            old = basis[p]
            row_of[old] = -1
            slot_of[old] = j
            row_of[c] = p
            slot_of[c] = -1
            basis[p] = c
            fixed[p] = True
            pivots[npiv] = c
            npiv += 1
    return pivots[:npiv].copy(), nonpivots[:nnon].copy(), used, row_of, slot_of, True


class FreeSetResult:
    """Outcome of eliminating a systematic H || s along a permutation.

    pi lists pivots || nonpivots || rest.  The reduced system is
    (I | A) in pi order with transformed syndrome s0; A is kept as the
    tableau `high`/`low` (rows in pivot order) addressed through
    `info_slot`, the tableau slot of each information position.
    """

    def __init__(self, high, low, pi, info_slot, n_info, n_nonpivot):
        self.high = high
        self.low = low
        self.pi = pi
        self.info_slot = info_slot
        self.n_info = n_info
        self.rows = high.shape[0]
        self.n_nonpivot = n_nonpivot

    @property
    def s0(self):
        w, b = divmod(self.n_info, WORD_BITS)
        h = (self.high[:, w] >> _U64(b)) & _U64(1)
        l = (self.low[:, w] >> _U64(b)) & _U64(1)
        return TritVector.from_trits((h + l).astype(np.uint8))

    def reduced_matrix(self):
        """(I | A) with columns in pi order."""
        tab = words_to_trits(self.high, self.low, self.n_info + 1)
        A = tab[:, self.info_slot]
        return TritMatrix.from_trits(np.hstack([np.eye(self.rows, dtype=np.uint8), A]))

    def solve(self, x):
        """Coordinates of the solution in pi order: (s0 - x.A^T) || x."""
        x = np.asarray(x, dtype=np.uint8)
        slot_trits = np.zeros(self.n_info + 1, np.uint8)
        slot_trits[self.info_slot] = x
        xh = pack_bits(slot_trits == 2)
        xl = pack_bits(slot_trits != 0)
        dots = dot_rows(self.high, self.low, xh, xl)
        s0 = self.s0.to_trits()
        return np.concatenate([(s0 + 3 - dots) % 3, x]).astype(np.uint8)


def free_set(B_high, B_low, n_info, s, perm, max_nonpivot):
    """Eliminate (I | B) || s^T along perm.

    B is given as bitsliced rows of width n_info.  Returns a FreeSetResult,
    or None when more than max_nonpivot nonpivots are met.
    """
    R = B_high.shape[0]
    width = n_info + 1
    nw = n_words(width)
    hi = np.zeros((R, nw), _U64)
    lo = np.zeros((R, nw), _U64)
    hi[:, :B_high.shape[1]] = B_high
    lo[:, :B_low.shape[1]] = B_low
    st = s.to_trits()
    w, b = divmod(n_info, WORD_BITS)
    hi[:, w] |= (st == 2).astype(_U64) << _U64(b)
    lo[:, w] |= (st != 0).astype(_U64) << _U64(b)
    perm = np.ascontiguousarray(perm, dtype=np.int64)
    piv, non, used, row_of, slot_of, ok = _tableau_kernel(hi, lo, perm, R, max_nonpivot)
    if not ok or piv.size < R:
        return None
    pi = np.concatenate([piv, non, perm[used:]])
    order = row_of[piv]
    info_slot = slot_of[pi[R:]]
    return FreeSetResult(hi[order], lo[order], pi, info_slot, n_info, non.size)


def free_set_reference(H, s, perm, max_nonpivot):
    """Same result via literal elim_single on the augmented matrix (slow).

    Returns ((I|A) in pi order, s0, pi) or None.
    """
    aug = TritMatrix.from_trits(np.hstack([H.to_trits(), s.to_trits()[:, None]]))
    red, pi, npiv, nnon = gauss_elim_reference(aug, perm, rows_needed=H.rows)
    if npiv < H.rows or nnon > max_nonpivot:
        return None
    tr = red.to_trits()
    return TritMatrix.from_trits(tr[:, pi]), TritVector.from_trits(tr[:, -1]), pi

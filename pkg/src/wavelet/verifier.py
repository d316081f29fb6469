"""Verification from the truncated signature, plus the classic check."""
import numpy as np

from .f3core import (TritVector, add_words, compact_to_trits, pack_bits, sub_words,
                     weight)
from .f3linalg import syndrome_mul
from .keygen import HEADER_LEN, MalformedKey, _parse_header, KIND_PUBLIC
from .thash import hash_message


class MalformedSignature(ValueError):
    pass


class RowSourceError(IOError):
    pass


class MemoryRowSource:
    """Rows of M held in memory as bitsliced words."""

    def __init__(self, pk):
        self.params = pk.params
        self.M = pk.M
        self.requested = []
        self.track = False

    def row(self, j):
        if self.track:
            self.requested.append(j)
        return self.M.high[j], self.M.low[j]


class FileRowSource:
    """Rows of M read on demand from a public-key file.

    Rows are contiguous in the compact trit stream, so row j starts at
    trit j*(n-k), which is generally not byte aligned.
    """

    def __init__(self, path):
        self.path = path
        self._fh = open(path, "rb")
        head = self._fh.read(HEADER_LEN)
        try:
            self.params, _ = _parse_header(head, (KIND_PUBLIC,))
        except MalformedKey:
            self._fh.close()
            raise
        self.requested = []
        self.track = False

    def row(self, j):
        if self.track:
            self.requested.append(j)
        width = self.params.r
        start = j * width
        first = start // 5
        last = (start + width + 4) // 5
        try:
            self._fh.seek(HEADER_LEN + first)
            data = self._fh.read(last - first)
        except OSError as exc:
            raise RowSourceError(f"reading row {j}: {exc}") from exc
        if len(data) != last - first:
            raise RowSourceError(f"public key file ends before row {j}")
        try:
            trits = compact_to_trits(data, 5 * len(data))
        except ValueError as exc:
            raise RowSourceError(f"row {j}: {exc}") from exc
        off = start - 5 * first
        t = trits[off:off + width]
        return pack_bits(t == 2), pack_bits(t != 0)

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def s_hat(s):
    """Pairwise (sum, difference); an odd tail entry is copied."""
    t = np.asarray(s, dtype=np.int64)
    k = t.size
    m = k // 2 * 2
    out = np.empty(k, np.int64)
    out[0:m:2] = t[0:m:2] + t[1:m:2]
    out[1:m:2] = t[0:m:2] - t[1:m:2]
    if k % 2:
        out[k - 1] = t[k - 1]
    return (out % 3).astype(np.uint8)


class VerifyReport:
    __slots__ = ("valid", "row_ops", "weight_s", "weight_s_hat", "weight_x")

    def __init__(self, valid, row_ops, weight_s, weight_s_hat, weight_x):
        self.valid = valid
        self.row_ops = row_ops
        self.weight_s = weight_s
        self.weight_s_hat = weight_s_hat
        self.weight_x = weight_x


def verify_report(message, sig, source):
    """Run verification and return counters along with the verdict."""
    p = source.params
    if sig.s.length != p.k:
        raise MalformedSignature(f"signature has {sig.s.length} trits, expected {p.k}")
    x = hash_message(sig.salt, message, p)
    xh = x.high.copy()
    xl = x.low.copy()
    st = sig.s.to_trits()
    sh = s_hat(st)
    ops = 0
    for j in np.flatnonzero(sh):
        rh, rl = source.row(int(j))
        if sh[j] == 1:
            xh, xl = add_words(xh, xl, rh, rl)
        else:
            xh, xl = sub_words(xh, xl, rh, rl)
        ops += 1
    ws = weight(sig.s)
    wx = weight(TritVector(p.r, xh, xl))
    return VerifyReport(ws + wx == p.w, ops, ws, int(np.count_nonzero(sh)), wx)


def verify(message, sig, pk):
    source = pk if hasattr(pk, "row") else MemoryRowSource(pk)
    return verify_report(message, sig, source).valid


def reconstruct_error(message, sig, classic, params):
    """e' = (h - s.R^T) || s for the classic check."""
    R = classic.to_trits()[:, params.r:].astype(np.int64)
    s = sig.s.to_trits().astype(np.int64)
    h = hash_message(sig.salt, message, params).to_trits().astype(np.int64)
    u = (h - R @ s) % 3
    return TritVector.from_trits(np.concatenate([u, s]).astype(np.uint8))


def wave_verify(message, e, salt, classic, params):
    """e . (I|R)^T == Hash(salt || m) and |e| == w."""
    if e.length != classic.cols or classic.cols != params.n:
        raise MalformedSignature("error vector length does not match the key")
    h = hash_message(salt, message, params)
    return syndrome_mul(e, classic) == h and weight(e) == params.w

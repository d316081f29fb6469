"""Bitsliced arithmetic over F3.

A trit t is stored as a pair of bits (high, low) with
0 -> (0,0), 1 -> (0,1), 2 -> (1,1).  A vector keeps all high bits in one
array of machine words and all low bits in another, so one logical
instruction acts on 64 trits at once.
"""
import numpy as np

WORD_BITS = 64
_U64 = np.uint64

# SWAR popcount masks, the 64-bit version of ~0/3, ~0/5, ~0/17
_M1 = _U64(0x5555555555555555)
_M2 = _U64(0x3333333333333333)
_M4 = _U64(0x0F0F0F0F0F0F0F0F)
_H01 = _U64(0x0101010101010101)


class MalformedEncoding(ValueError):
    pass


# scalar versions, used as oracles and for documentation of the gate formulas

def _pair(a):
    return (1, 1) if a == 2 else (0, a)


def _trit(hl):
    h, l = hl
    return 2 if h else l


def f3_add(a, b):
    ah, al = _pair(a)
    bh, bl = _pair(b)
    h = (al ^ bh) & (ah ^ bl)
    l = (al ^ bl) | ((ah ^ bl) ^ bh)
    return _trit((h, l))


def f3_sub(a, b):
    ah, al = _pair(a)
    bh, bl = _pair(b)
    h = (al ^ (bh ^ bl)) & (ah ^ bl)
    l = (al ^ bl) | (ah ^ bh)
    return _trit((h, l))


def f3_neg(a):
    ah, al = _pair(a)
    return _trit((ah ^ al, al))


# word-level kernels; they work on numpy arrays of any shape

def add_words(ah, al, bh, bl):
    t = ah ^ bl
    return (al ^ bh) & t, (al ^ bl) | (t ^ bh)


def sub_words(ah, al, bh, bl):
    return (al ^ (bh ^ bl)) & (ah ^ bl), (al ^ bl) | (ah ^ bh)


def neg_words(ah, al):
    return ah ^ al, al.copy()


def mul_words(ah, al, bh, bl):
    """Trit-wise product."""
    l = al & bl
    return (ah ^ bh) & l, l


def swar_popcount(words):
    """Per-word popcount by the classic shift-and-mask method."""
    x = np.asarray(words, dtype=_U64)
    x = x - ((x >> _U64(1)) & _M1)
    x = (x & _M2) + ((x >> _U64(2)) & _M2)
    x = (x + (x >> _U64(4))) & _M4
    return (x * _H01) >> _U64(56)


def n_words(length):
    return (length + WORD_BITS - 1) // WORD_BITS


def pack_bits(bits):
    """Pack a 0/1 array (last axis) into little-endian uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    length = bits.shape[-1]
    nw = n_words(length)
    pad = nw * WORD_BITS - length
    if pad:
        bits = np.concatenate(
            [bits, np.zeros(bits.shape[:-1] + (pad,), np.uint8)], axis=-1)
    by = np.packbits(bits, axis=-1, bitorder="little")
    return np.ascontiguousarray(by).view("<u8").astype(_U64, copy=False)


def unpack_bits(words, length):
    words = np.ascontiguousarray(words, dtype="<u8")
    by = words.view(np.uint8)
    return np.unpackbits(by, axis=-1, count=length, bitorder="little")


def trits_to_words(trits):
    t = np.asarray(trits, dtype=np.uint8)
    return pack_bits(t == 2), pack_bits(t != 0)


def words_to_trits(high, low, length):
    h = unpack_bits(high, length)
    l = unpack_bits(low, length)
    return (l + h).astype(np.uint8)


class TritVector:
    """Immutable vector over F3 in bitsliced form."""

    __slots__ = ("length", "high", "low")

    def __init__(self, length, high, low):
        self.length = int(length)
        self.high = high
        self.low = low
        high.flags.writeable = False
        low.flags.writeable = False

    @classmethod
    def from_trits(cls, trits):
        t = np.asarray(trits, dtype=np.uint8).ravel()
        if t.size and t.max() > 2:
            raise ValueError("trit values must be in {0,1,2}")
        h, l = trits_to_words(t)
        return cls(t.size, h, l)

    @classmethod
    def zeros(cls, length):
        nw = n_words(length)
        return cls(length, np.zeros(nw, _U64), np.zeros(nw, _U64))

    def to_trits(self):
        return words_to_trits(self.high, self.low, self.length)

    def __len__(self):
        return self.length

    def __getitem__(self, i):
        if not 0 <= i < self.length:
            raise IndexError(i)
        w, b = divmod(i, WORD_BITS)
        h = int(self.high[w] >> _U64(b)) & 1
        l = int(self.low[w] >> _U64(b)) & 1
        return 2 if h else l

    def __eq__(self, other):
        if not isinstance(other, TritVector):
            return NotImplemented
        return (self.length == other.length
                and np.array_equal(self.high, other.high)
                and np.array_equal(self.low, other.low))

    def __hash__(self):
        return hash((self.length, self.high.tobytes(), self.low.tobytes()))

    def __repr__(self):
        t = "".join(map(str, self.to_trits()[:40]))
        more = "..." if self.length > 40 else ""
        return f"TritVector({self.length}, {t}{more})"

    def __add__(self, other):
        return vec_add(self, other)

    def __sub__(self, other):
        return vec_sub(self, other)

    def __neg__(self):
        return vec_neg(self)


def _check(u, v):
    if u.length != v.length:
        raise ValueError(f"length mismatch: {u.length} vs {v.length}")


def vec_add(u, v):
    _check(u, v)
    return TritVector(u.length, *add_words(u.high, u.low, v.high, v.low))


def vec_sub(u, v):
    _check(u, v)
    return TritVector(u.length, *sub_words(u.high, u.low, v.high, v.low))


def vec_neg(u):
    return TritVector(u.length, *neg_words(u.high, u.low))


def weight(v):
    """Number of nonzero trits, i.e. the popcount of the low words."""
    return int(swar_popcount(v.low).sum())


def concat(*vs):
    return TritVector.from_trits(np.concatenate([v.to_trits() for v in vs]))


# compact encoding: 5 trits per byte, sum t_i 3^i

_POW3 = np.array([1, 3, 9, 27, 81], dtype=np.uint16)
_BYTE_TRITS = np.array(
    [[(b // 3 ** i) % 3 for i in range(5)] for b in range(243)], dtype=np.uint8)


def trits_to_compact(trits):
    t = np.asarray(trits, dtype=np.uint8).ravel()
    pad = (-t.size) % 5
    if pad:
        t = np.concatenate([t, np.zeros(pad, np.uint8)])
    return (t.reshape(-1, 5).astype(np.uint16) @ _POW3).astype(np.uint8).tobytes()


def compact_to_trits(data, length):
    by = np.frombuffer(bytes(data), dtype=np.uint8)
    if by.size != (length + 4) // 5:
        raise MalformedEncoding(
            f"expected {(length + 4) // 5} bytes for {length} trits, got {by.size}")
    if by.size and by.max() >= 243:
        raise MalformedEncoding("compact byte value >= 243")
    t = _BYTE_TRITS[by].ravel()
    if np.any(t[length:]):
        raise MalformedEncoding("nonzero padding trits")
    return t[:length].copy()


def to_compact(v):
    return trits_to_compact(v.to_trits())


def from_compact(data, length):
    return TritVector.from_trits(compact_to_trits(data, length))


def random_trit_array(rng, length, exclude_zero=False):
    """Uniform trits from a byte stream.

    Uniform trits reject bytes >= 243 and split the rest into 5 base-3
    digits.  Nonzero trits take single bits from bytes (1 or 2).
    """
    if length == 0:
        return np.zeros(0, np.uint8)
    if exclude_zero:
        nbytes = (length + 7) // 8
        bits = np.unpackbits(np.frombuffer(rng.read(nbytes), np.uint8),
                             count=length, bitorder="little")
        return (bits + 1).astype(np.uint8)
    out = []
    have = 0
    while have < length:
        need = (length - have + 4) // 5
        by = np.frombuffer(rng.read(need + need // 16 + 4), np.uint8)
        by = by[by < 243]
        t = _BYTE_TRITS[by].ravel()
        out.append(t)
        have += t.size
    return np.concatenate(out)[:length].copy()


def random_trits(rng, length, exclude_zero=False):
    return TritVector.from_trits(random_trit_array(rng, length, exclude_zero))

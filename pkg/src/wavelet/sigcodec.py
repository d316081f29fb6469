"""Prefix-code compression of signature vectors and the signature wire format.

Consecutive pairs (2TMR) or triples (3TMR) of trits are replaced by
codewords of a canonical prefix code; decoding uses the table-driven
canonical search (first codes per length, left-justified to the longest
length, plus a start-length table indexed by the leading bits).
"""
import math
from dataclasses import dataclass

import numpy as np

from .f3core import TritVector
from .params import get_params
from .signer import SALT_BYTES, Signature

MAGIC = b"WSIG"
VERSION = 1
CODEC_2TMR = 0x02
CODEC_3TMR = 0x03
HEADER_LEN = 8


class MalformedSignature(ValueError):
    pass


# symbols listed in canonical order (shortest codes first)
_PAIR_CODES = [
    ((2, 2), "00"), ((2, 1), "01"), ((1, 2), "100"), ((1, 1), "101"),
    ((2, 0), "1100"), ((1, 0), "1101"), ((0, 2), "1110"),
    ((0, 1), "11110"), ((0, 0), "11111"),
]

_TRIPLE_CODES = [
    ((2, 2, 2), "000"), ((2, 2, 1), "001"), ((2, 1, 2), "010"), ((1, 2, 2), "011"),
    ((2, 1, 1), "100"), ((1, 2, 1), "1010"), ((1, 1, 2), "1011"), ((1, 1, 1), "1100"),
    ((2, 2, 0), "110100"), ((2, 0, 2), "110101"), ((0, 2, 2), "110110"),
    ((2, 1, 0), "110111"), ((2, 0, 1), "111000"), ((0, 2, 1), "111001"),
    ((1, 2, 0), "111010"), ((1, 0, 2), "111011"), ((0, 1, 2), "111100"),
    ((1, 1, 0), "111101"), ((1, 0, 1), "111110"), ((0, 1, 1), "1111110"),
    ((2, 0, 0), "111111100"), ((0, 2, 0), "1111111010"), ((0, 0, 2), "1111111011"),
    ((1, 0, 0), "1111111100"), ((0, 1, 0), "1111111101"), ((0, 0, 1), "1111111110"),
    ((0, 0, 0), "1111111111"),
]

# decode tables, indexed by code length (entries below the shortest length are 0)
# The published pair table lists search_start as [4]*5 + [5]*3, which sends
# the window 11101 (codeword 1110 followed by a 1) to length 5; the
# consistent table is [4]*6 + [5]*2.  The final first_symbol entry is a
# sentinel that decoding never reads; it is kept as published.
PUBLISHED_PAIR_SEARCH_START = [2] * 16 + [3] * 8 + [4] * 5 + [5] * 3

_PAIR_TABLES = dict(
    code_len=[2, 2, 3, 3, 4, 4, 4, 5, 5],
    first_symbol=[0, 0, 0, 2, 4, 7, 10],
    first_code_r=[0, 0, 0, 4, 12, 30, 32],
    first_code_l=[0, 0, 0, 16, 24, 30, 32],
    search_start=[2] * 16 + [3] * 8 + [4] * 6 + [5] * 2,
)

_TRIPLE_TABLES = dict(
    code_len=[3] * 5 + [4] * 3 + [6] * 11 + [7, 9] + [10] * 6,
    first_symbol=[0, 0, 0, 0, 5, 8, 8, 19, 20, 20, 21, 27],
    first_code_r=[0, 0, 0, 0, 10, 10, 52, 126, 126, 508, 1018, 1024],
    first_code_l=[0, 0, 0, 0, 640, 832, 832, 1008, 1016, 1016, 1018, 1024],
    search_start=[3] * 640 + [4] * 192 + [6] * 176 + [7] * 8 + [9] * 2 + [10] * 6,
)


@dataclass(frozen=True)
class MRCode:
    codec_id: int
    arity: int
    codebook: tuple            # ((symbol tuple, bit string), ...) in canonical order
    code_len: tuple
    first_symbol: tuple
    first_code_r: tuple
    first_code_l: tuple
    search_start: tuple

    @property
    def max_len(self):
        return max(self.code_len)

    @property
    def min_len(self):
        return min(self.code_len)

    def symbol_index(self):
        return {sym: i for i, (sym, _) in enumerate(self.codebook)}


def _make(codec_id, arity, codes, tables):
    return MRCode(codec_id, arity, tuple(codes), *(tuple(tables[k]) for k in (
        "code_len", "first_symbol", "first_code_r", "first_code_l", "search_start")))


CODE_2TMR = _make(CODEC_2TMR, 2, _PAIR_CODES, _PAIR_TABLES)
CODE_3TMR = _make(CODEC_3TMR, 3, _TRIPLE_CODES, _TRIPLE_TABLES)
CODES = {CODEC_2TMR: CODE_2TMR, CODEC_3TMR: CODE_3TMR}
CODEC_NAMES = {"2tmr": CODEC_2TMR, "3tmr": CODEC_3TMR}


def canonical_tables(lengths):
    """Rebuild the decode tables from a sorted list of code lengths."""
    L = max(lengths)
    first_symbol = [0] * (L + 2)
    first_code_r = [0] * (L + 2)
    first_code_l = [0] * (L + 2)
    count = [lengths.count(l) for l in range(L + 1)]
    code = 0
    sym = 0
    for l in range(1, L + 1):
        code <<= 1
        first_symbol[l] = sym
        first_code_r[l] = code
        first_code_l[l] = code << (L - l)
        code += count[l]
        sym += count[l]
    first_symbol[L + 1] = sym
    first_code_r[L + 1] = 1 << L
    first_code_l[L + 1] = 1 << L
    # lengths below the shortest are unused; keep them zero
    lmin = min(lengths)
    for l in range(lmin):
        first_symbol[l] = first_code_r[l] = first_code_l[l] = 0
    # lengths with no codes: first_code_l points at the next populated
    # length, first_code_r repeats the previous one
    for l in range(L, lmin - 1, -1):
        if count[l] == 0:
            first_code_l[l] = first_code_l[l + 1]
    for l in range(lmin, L + 1):
        if count[l] == 0:
            first_code_r[l] = first_code_r[l - 1]
    search_start = []
    for v in range(1 << L):
        l = lmin
        while l < L and v >= first_code_l[l + 1]:
            l += 1
        search_start.append(l)
    return dict(first_symbol=first_symbol, first_code_r=first_code_r,
                first_code_l=first_code_l, search_start=search_start)


# ---------------------------------------------------------------------------
# bit streams (MSB first within each byte)

class BitWriter:
    def __init__(self):
        self.chunks = []

    def write(self, bits):
        self.chunks.append(bits)

    def bitstring(self):
        return "".join(self.chunks)

    def to_bytes(self):
        s = self.bitstring()
        pad = (-len(s)) % 8
        s += "0" * pad
        return int(s, 2).to_bytes(len(s) // 8, "big") if s else b"", len(s) - pad


def bits_to_bytes(bits):
    pad = (-len(bits)) % 8
    bits = bits + "0" * pad
    return int(bits, 2).to_bytes(len(bits) // 8, "big") if bits else b""


def bytes_to_bits(data):
    return "".join(f"{b:08b}" for b in data)


_RAW = {0: "00", 1: "01", 2: "10"}
_RAW_INV = {"00": 0, "01": 1, "10": 2}


def compress(s, code):
    """Bit string of codewords for consecutive groups, then raw 2-bit tail trits."""
    t = s.to_trits() if isinstance(s, TritVector) else np.asarray(s, dtype=np.uint8)
    a = code.arity
    m = t.size // a * a
    lookup = {sym: bits for sym, bits in code.codebook}
    groups = t[:m].reshape(-1, a)
    # symbol key as an integer for speed
    keys = groups @ (3 ** np.arange(a - 1, -1, -1))
    by_key = {sum(v * 3 ** (a - 1 - i) for i, v in enumerate(sym)): bits
              for sym, bits in lookup.items()}
    table = [by_key[i] for i in range(3 ** a)]
    out = [table[k] for k in keys.tolist()]
    out += [_RAW[int(v)] for v in t[m:]]
    return "".join(out)


def compressed_length(s, code):
    t = s.to_trits() if isinstance(s, TritVector) else np.asarray(s)
    a = code.arity
    m = t.size // a * a
    lengths = {sym: len(bits) for sym, bits in code.codebook}
    return sum(lengths[tuple(g)] for g in t[:m].reshape(-1, a).tolist()) + 2 * (t.size - m)


def decompress(bits, k, code):
    """Table-driven decoding of exactly k trits."""
    a = code.arity
    L = code.max_len
    groups = k // a
    n = len(bits)
    # pad so that every L-bit window is defined; padding is checked below
    padded = bits + "0" * L
    val = int(padded, 2) if padded else 0
    total_bits = len(padded)
    fcl = code.first_code_l
    fs = code.first_symbol
    ss = code.search_start
    syms = code.codebook
    out = []
    pos = 0
    mask = (1 << L) - 1
    for _ in range(groups):
        if pos >= n:
            raise MalformedSignature("bit stream ended early")
        window = (val >> (total_bits - pos - L)) & mask
        l = ss[window]
        while window >= fcl[l + 1]:
            l += 1
        if pos + l > n:
            raise MalformedSignature("bit stream ended inside a codeword")
        idx = fs[l] + ((window - fcl[l]) >> (L - l))
        out.extend(syms[idx][0])
        pos += l
    for _ in range(k - groups * a):
        chunk = bits[pos:pos + 2]
        if len(chunk) < 2:
            raise MalformedSignature("bit stream ended inside the raw tail")
        if chunk not in _RAW_INV:
            raise MalformedSignature("invalid raw tail pattern 11")
        out.append(_RAW_INV[chunk])
        pos += 2
    return TritVector.from_trits(np.array(out, dtype=np.uint8)), pos


def entropy_estimate(freqs):
    """Shannon entropy in bits of a distribution."""
    total = math.fsum(freqs)
    if abs(total - 1) > 1e-9:
        raise ValueError("frequencies must sum to 1")
    return -math.fsum(p * math.log2(p) for p in freqs if p > 0)


def expected_bits_per_group(code, probs):
    """Mean codeword length when trits are i.i.d. with probs[v]."""
    return math.fsum(math.prod(probs[v] for v in sym) * len(bits) for sym, bits in code.codebook)


# ---------------------------------------------------------------------------
# wire format

def encode_signature(sig, params, codec_id=CODEC_3TMR):
    params = get_params(params)
    if codec_id not in CODES:
        raise ValueError(f"unknown codec {codec_id:#04x}")
    if sig.s.length != params.k:
        raise ValueError("signature length does not match the parameter set")
    payload = bits_to_bytes(compress(sig.s, CODES[codec_id]))
    return MAGIC + bytes([VERSION, params.param_id, codec_id, 0]) + sig.salt + payload


def parse_header(data):
    if len(data) < HEADER_LEN + SALT_BYTES:
        raise MalformedSignature("signature shorter than header and salt")
    if data[:4] != MAGIC:
        raise MalformedSignature("bad magic")
    if data[4] != VERSION:
        raise MalformedSignature(f"unsupported version {data[4]}")
    if data[6] not in CODES:
        raise MalformedSignature(f"unknown codec {data[6]:#04x}")
    if data[7] != 0:
        raise MalformedSignature("reserved byte is not zero")
    try:
        params = get_params(data[5])
    except ValueError as exc:
        raise MalformedSignature(str(exc)) from None
    return params, data[6]


def decode_signature(data):
    """Returns (Signature, params, codec_id)."""
    data = bytes(data)
    params, codec_id = parse_header(data)
    salt = data[HEADER_LEN:HEADER_LEN + SALT_BYTES]
    payload = data[HEADER_LEN + SALT_BYTES:]
    bits = bytes_to_bits(payload)
    s, used = decompress(bits, params.k, CODES[codec_id])
    if (used + 7) // 8 != len(payload):
        raise MalformedSignature("trailing bytes after the payload")
    if "1" in bits[used:]:
        raise MalformedSignature("nonzero padding bits")
    return Signature(salt, s), params, codec_id


def payload_size(data):
    return len(data) - HEADER_LEN - SALT_BYTES


def recompress(data, codec_id):
    sig, params, _ = decode_signature(data)
    return encode_signature(sig, params, codec_id)

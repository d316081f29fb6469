"""Hashing from byte strings to ternary syndromes."""
import hashlib
import math

import numpy as np

from .f3core import TritVector, _BYTE_TRITS

PREFIX_HASH = b"\x01"
PREFIX_EXPAND = b"\x02"
PREFIX_KEYGEN = b"\x03"
PREFIX_SIGN = b"\x04"

DIGEST_BYTES = 32


class XofStream:
    """Sequential reader over SHAKE-256 output.

    hashlib only offers one-shot squeezing, so when the buffer runs dry
    we squeeze a longer prefix again and keep the unread tail.
    """

    def __init__(self, data, initial=1024):
        self._xof = hashlib.shake_256(data)
        self._buf = self._xof.digest(initial)
        self._pos = 0

    def read(self, n):
        end = self._pos + n
        if end > len(self._buf):
            size = max(2 * len(self._buf), end + 1024)
            self._buf = self._xof.digest(size)
        out = self._buf[self._pos:end]
        self._pos = end
        return out

    @property
    def consumed(self):
        return self._pos

    def uniform_below(self, bound):
        """Uniform integer in [0, bound) by masking and rejection."""
        if bound <= 1:
            return 0
        bits = (bound - 1).bit_length()
        nbytes = (bits + 7) // 8
        mask = (1 << bits) - 1
        while True:
            x = int.from_bytes(self.read(nbytes), "little") & mask
            if x < bound:
                return x

    def bits128(self):
        return int.from_bytes(self.read(16), "little")


def binary_hash(data):
    return hashlib.sha3_512(PREFIX_HASH + data).digest()[:DIGEST_BYTES]


def mu_for_bits(bits):
    """Largest m with 3^m <= 2^bits, computed exactly."""
    m = int(bits / math.log2(3))
    while 3 ** (m + 1) <= 2 ** bits:
        m += 1
    while 3 ** m > 2 ** bits:
        m -= 1
    return m


MU = mu_for_bits(8 * DIGEST_BYTES)


def ternarize(x, tau):
    """Little-endian base-3 digits of x modulo 3^tau."""
    if isinstance(x, (bytes, bytearray)):
        x = int.from_bytes(x, "little")
    out = np.zeros(tau, np.uint8)
    for i in range(tau):
        x, out[i] = divmod(x, 3)
    return TritVector.from_trits(out)


def expand_trits(seed, tau):
    if tau <= 0:
        return np.zeros(0, np.uint8), 0
    xof = XofStream(PREFIX_EXPAND + seed, initial=(tau * 256) // 1215 + 64)
    chunks = []
    have = 0
    while have < tau:
        need = (tau - have + 4) // 5
        by = np.frombuffer(xof.read(need), np.uint8)
        by = by[by < 243]
        chunks.append(_BYTE_TRITS[by].ravel())
        have += 5 * by.size
    return np.concatenate(chunks)[:tau].copy(), xof.consumed


def expand(seed, tau):
    return TritVector.from_trits(expand_trits(seed, tau)[0])


def hash_to_ternary(data, syndrome_len):
    """Hash bytes to a vector of syndrome_len trits."""
    h = binary_hash(data)
    mu = min(MU, syndrome_len)
    head = ternarize(h, mu).to_trits()
    tail = expand_trits(h, syndrome_len - mu)[0]
    return TritVector.from_trits(np.concatenate([head, tail]))


def hash_message(salt, message, params):
    return hash_to_ternary(bytes(salt) + bytes(message), params.n - params.k)

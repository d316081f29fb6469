"""Signing: hash, decode, permute, keep the last k coordinates."""
import os
from dataclasses import dataclass

import numpy as np

from .decoder import decode
from .f3core import TritVector, pack_bits
from .f3linalg import apply_perm, apply_perm_inv, dot_rows
from .thash import DIGEST_BYTES, PREFIX_SIGN, XofStream, hash_message

SALT_BYTES = DIGEST_BYTES


@dataclass(frozen=True)
class Signature:
    salt: bytes
    s: TritVector

    def __post_init__(self):
        if len(self.salt) != SALT_BYTES:
            raise ValueError(f"salt must be {SALT_BYTES} bytes")


def signer_rng(entropy=None):
    return XofStream(PREFIX_SIGN + (os.urandom(32) if entropy is None else bytes(entropy)))


def _systematic_syndrome(R, z):
    """z . (I | R)^T"""
    head = z[:R.rows]
    tail = z[R.rows:]
    vh = pack_bits(tail == 2)
    vl = pack_bits(tail != 0)
    return (head.astype(np.int64) + dot_rows(R.high, R.low, vh, vl)) % 3


def uv_syndrome(sk, y):
    """y . H_sk^T from the secret structure, without building H_sk."""
    p = sk.params
    a, b, c, d = sk.diagonals()
    yt = (y.to_trits() if isinstance(y, TritVector) else np.asarray(y)).astype(np.int64)
    y1, y2 = yt[:p.half], yt[p.half:]
    top = _systematic_syndrome(sk.R_U, (d * y1 - b * y2) % 3)
    bot = _systematic_syndrome(sk.R_V, (a * y2 - c * y1) % 3)
    return TritVector.from_trits(np.concatenate([top, bot]).astype(np.uint8))


def wave_sign_full(message, sk, tables, rng, stats=None):
    """Untruncated signature: (e, salt) with e . (I|R)^T = Hash(salt || m)."""
    p = sk.params
    salt = rng.read(SALT_BYTES)
    h = hash_message(salt, message, p)
    v = np.concatenate([h.to_trits(), np.zeros(p.k, np.uint8)])
    # (h, 0) . pi(H_sk)^T == pi^-1(h, 0) . H_sk^T
    x = uv_syndrome(sk, apply_perm_inv(sk.pi_sk, v))
    y = decode(x, sk, tables, rng, stats=stats)
    return apply_perm(sk.pi_sk, y), salt


def sign(message, sk, tables, rng=None, stats=None):
    rng = signer_rng() if rng is None else rng
    e, salt = wave_sign_full(message, sk, tables, rng, stats=stats)
    return Signature(salt, TritVector.from_trits(e.to_trits()[sk.params.r:]))

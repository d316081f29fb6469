"""Key generation, the public-key transform and key wire formats."""
from dataclasses import dataclass, field

import numpy as np

from . import f3core
from .f3core import TritVector, compact_to_trits, random_trit_array, trits_to_compact
from .f3linalg import TritMatrix, fisher_yates, gauss_elim, parity_check_uv
from .params import get_params
from .thash import PREFIX_KEYGEN, XofStream

MAGIC = b"WVLT"
VERSION = 1
KIND_PUBLIC = 0x00
KIND_SECRET = 0x01
KIND_SECRET_SEED = 0x02
HEADER_LEN = 8


class MalformedKey(ValueError):
    pass


@dataclass
class SecretKey:
    params: object
    R_U: TritMatrix
    R_V: TritMatrix
    a: TritVector
    b: TritVector
    c: TritVector
    d: TritVector
    pi_sk: np.ndarray
    seed: bytes = None

    def diagonals(self):
        return tuple(v.to_trits().astype(np.int64) for v in (self.a, self.b, self.c, self.d))

    def parity_check(self):
        return parity_check_uv(self.R_U, self.R_V, self.a, self.b, self.c, self.d)

    def __eq__(self, other):
        return (isinstance(other, SecretKey) and self.params == other.params
                and self.R_U == other.R_U and self.R_V == other.R_V
                and all(getattr(self, x) == getattr(other, x) for x in "abcd")
                and np.array_equal(self.pi_sk, other.pi_sk))


@dataclass
class PublicKey:
    params: object
    M: TritMatrix
    _extra: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def param_id(self):
        return self.params.param_id

    def __eq__(self, other):
        return isinstance(other, PublicKey) and self.params == other.params and self.M == other.M


def keygen_rng(seed, params):
    return XofStream(PREFIX_KEYGEN + bytes([params.param_id]) + bytes(seed))


def sample_secret(seed, params):
    """Draw R_U, R_V, a, b, c, d and an initial permutation from the seed."""
    rng = keygen_rng(seed, params)
    h = params.half
    R_U = TritMatrix.from_trits(
        random_trit_array(rng, params.rows_U * params.k_U).reshape(params.rows_U, params.k_U))
    R_V = TritMatrix.from_trits(
        random_trit_array(rng, params.rows_V * params.k_V).reshape(params.rows_V, params.k_V))
    a = random_trit_array(rng, h, exclude_zero=True).astype(np.int64)
    b = random_trit_array(rng, h).astype(np.int64)
    c = random_trit_array(rng, h, exclude_zero=True).astype(np.int64)
    # d takes one of the two values avoiding b*c/a; 1/a == a over F3
    forbidden = (b * c * a) % 3
    step = random_trit_array(rng, h, exclude_zero=True).astype(np.int64)
    d = (forbidden + step) % 3
    vecs = [TritVector.from_trits(v.astype(np.uint8)) for v in (a, b, c, d)]
    return rng, R_U, R_V, vecs


def keygen(seed, params, return_classic=False):
    """Deterministic key pair from a seed of params.seed_bytes bytes."""
    params = get_params(params)
    seed = bytes(seed)
    if len(seed) != params.seed_bytes:
        raise ValueError(f"seed must be {params.seed_bytes} bytes")
    rng, R_U, R_V, (a, b, c, d) = sample_secret(seed, params)
    H = parity_check_uv(R_U, R_V, a, b, c, d)
    r = params.r
    while True:
        pi = fisher_yates(rng, params.n)
        reduced, pi2, npiv = gauss_elim(H, pi)
        if npiv == r:
            break
    sk = SecretKey(params, R_U, R_V, a, b, c, d, pi2, seed)
    R = TritMatrix.from_trits(reduced.to_trits()[:, r:])
    pk = PublicKey(params, build_m(R))
    if return_classic:
        return sk, pk, reduced
    return sk, pk


def classic_wave_pk(sk):
    """(I | R): the systematic parity-check matrix behind the public key."""
    reduced, _, npiv = gauss_elim(sk.parity_check(), sk.pi_sk)
    if npiv != sk.params.r:
        raise ValueError("secret key permutation does not give a full-rank block")
    return reduced


def build_m(R):
    """Rows of R^T combined pairwise: sum and difference; odd tail negated."""
    RT = R.to_trits().T.astype(np.int16)
    k = RT.shape[0]
    M = np.empty_like(RT)
    m = k // 2 * 2
    M[0:m:2] = RT[0:m:2] + RT[1:m:2]
    M[1:m:2] = RT[0:m:2] - RT[1:m:2]
    if k % 2:
        M[k - 1] = -RT[k - 1]
    return TritMatrix.from_trits((M % 3).astype(np.uint8))


# ---------------------------------------------------------------------------
# wire formats

def _header(params, kind):
    return MAGIC + bytes([VERSION, params.param_id, kind, 0])


def _parse_header(data, kinds):
    if len(data) < HEADER_LEN:
        raise MalformedKey("key file shorter than its header")
    if data[:4] != MAGIC:
        raise MalformedKey("bad magic")
    if data[4] != VERSION:
        raise MalformedKey(f"unsupported version {data[4]}")
    if data[6] not in kinds:
        raise MalformedKey(f"unexpected key kind {data[6]:#04x}")
    if data[7] != 0:
        raise MalformedKey("reserved header byte is not zero")
    try:
        params = get_params(data[5])
    except ValueError as exc:
        raise MalformedKey(str(exc)) from None
    return params, data[6]


def perm_bits(n):
    return max(1, (n - 1).bit_length())


def pack_perm(pi, n):
    bits = perm_bits(n)
    pi = np.asarray(pi, dtype=np.int64)
    shifts = np.arange(bits - 1, -1, -1, dtype=np.int64)
    b = ((pi[:, None] >> shifts) & 1).astype(np.uint8).ravel()
    return np.packbits(b).tobytes()


def unpack_perm(data, n):
    bits = perm_bits(n)
    b = np.unpackbits(np.frombuffer(data, np.uint8), count=n * bits).reshape(n, bits)
    weights = 1 << np.arange(bits - 1, -1, -1, dtype=np.int64)
    return b.astype(np.int64) @ weights


def public_payload_len(params):
    return (params.k * params.r + 4) // 5


def serialize_pk(pk):
    return _header(pk.params, KIND_PUBLIC) + trits_to_compact(pk.M.to_trits())


def deserialize_pk(data):
    data = bytes(data)
    params, _ = _parse_header(data, (KIND_PUBLIC,))
    body = data[HEADER_LEN:]
    if len(body) != public_payload_len(params):
        raise MalformedKey(f"public key payload is {len(body)} bytes, expected {public_payload_len(params)}")
    try:
        t = compact_to_trits(body, params.k * params.r)
    except f3core.MalformedEncoding as exc:
        raise MalformedKey(str(exc)) from None
    return PublicKey(params, TritMatrix.from_trits(t.reshape(params.k, params.r)))


def _sk_sections(params):
    h = params.half
    return [("R_U", params.rows_U * params.k_U), ("R_V", params.rows_V * params.k_V),
            ("a", h), ("b", h), ("c", h), ("d", h)]


def secret_payload_len(params):
    trits = sum((length + 4) // 5 for _, length in _sk_sections(params))
    return trits + (params.n * perm_bits(params.n) + 7) // 8


def serialize_sk(sk, seed_only=False):
    p = sk.params
    if seed_only:
        if sk.seed is None:
            raise ValueError("key has no seed")
        return _header(p, KIND_SECRET_SEED) + sk.seed
    parts = [_header(p, KIND_SECRET), trits_to_compact(sk.R_U.to_trits()),
             trits_to_compact(sk.R_V.to_trits())]
    parts += [trits_to_compact(v.to_trits()) for v in (sk.a, sk.b, sk.c, sk.d)]
    parts.append(pack_perm(sk.pi_sk, p.n))
    return b"".join(parts)


def deserialize_sk(data):
    data = bytes(data)
    params, kind = _parse_header(data, (KIND_SECRET, KIND_SECRET_SEED))
    body = data[HEADER_LEN:]
    if kind == KIND_SECRET_SEED:
        if len(body) != params.seed_bytes:
            raise MalformedKey("seed has the wrong length")
        return keygen(body, params)[0]
    if len(body) != secret_payload_len(params):
        raise MalformedKey(f"secret key payload is {len(body)} bytes, expected {secret_payload_len(params)}")
    pos = 0
    vals = {}
    try:
        for name, length in _sk_sections(params):
            nb = (length + 4) // 5
            vals[name] = compact_to_trits(body[pos:pos + nb], length)
            pos += nb
    except f3core.MalformedEncoding as exc:
        raise MalformedKey(str(exc)) from None
    pi = unpack_perm(body[pos:], params.n)
    if not np.array_equal(np.sort(pi), np.arange(params.n)):
        raise MalformedKey("stored permutation is not a bijection")
    a, b, c, d = (vals[x].astype(np.int64) for x in "abcd")
    if np.any(a == 0) or np.any(c == 0) or np.any((a * d - b * c) % 3 == 0):
        raise MalformedKey("diagonal vectors violate a, c != 0 and ad != bc")
    return SecretKey(
        params,
        TritMatrix.from_trits(vals["R_U"].reshape(params.rows_U, params.k_U)),
        TritMatrix.from_trits(vals["R_V"].reshape(params.rows_V, params.k_V)),
        *(TritVector.from_trits(vals[x]) for x in "abcd"),
        pi_sk=pi)

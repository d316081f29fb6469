import hashlib

import numpy as np
import pytest

from wavelet.f3core import to_compact
from wavelet.params import SUPERTUBOS, TOY48
from wavelet.thash import (MU, XofStream, binary_hash, expand, expand_trits, hash_message,
                           hash_to_ternary, mu_for_bits, ternarize)

SALT = bytes(range(32))


def test_ternarize_examples():
    assert ternarize(5, 3).to_trits().tolist() == [2, 1, 0]
    assert ternarize(0, 4).to_trits().tolist() == [0, 0, 0, 0]
    assert ternarize(242, 5).to_trits().tolist() == [2, 2, 2, 2, 2]
    # reduction modulo 3^tau
    assert ternarize(3 ** 5 + 7, 5).to_trits().tolist() == [1, 2, 0, 0, 0]


def test_ternarize_inverts_base3():
    rng = np.random.default_rng(1)
    for _ in range(200):
        tau = int(rng.integers(1, 60))
        x = int(rng.integers(0, 2 ** 62)) % 3 ** tau
        digits = ternarize(x, tau).to_trits()
        assert sum(int(d) * 3 ** i for i, d in enumerate(digits)) == x


def test_mu_exact():
    assert MU == 161 == mu_for_bits(256)
    assert 3 ** 161 <= 2 ** 256 < 3 ** 162


def test_expand_basic():
    assert expand(bytes(32), 0).length == 0
    a = expand(b"seed" * 8, 2726)
    assert a == expand(b"seed" * 8, 2726)
    assert a.length == 2726
    assert "".join(map(str, expand(bytes(32), 20).to_trits())) == "00212202102022210012"


def test_expand_byte_consumption():
    tau = 2726
    used = [expand_trits(hashlib.sha256(b"%d" % i).digest(), tau)[1] for i in range(200)]
    mean = sum(used) / len(used)
    # 256 tau / (243 * 5) bytes on average, rounded up to whole groups
    assert abs(mean - 256 * tau / 1215) < 5


def test_expand_frequencies():
    t = np.concatenate([expand_trits(b"freq%d" % i, 10 ** 5)[0] for i in range(10)])
    n = t.size
    sigma = (n * (1 / 3) * (2 / 3)) ** 0.5
    for sym in range(3):
        assert abs(np.count_nonzero(t == sym) - n / 3) < 5 * sigma


def test_hash_split_point():
    data = SALT + b"message"
    h = binary_hash(data)
    out = hash_to_ternary(data, 2887).to_trits()
    assert np.array_equal(out[:161], ternarize(h, 161).to_trits())
    assert np.array_equal(out[161:], expand(h, 2887 - 161).to_trits())
    assert binary_hash(data) == hashlib.sha3_512(b"\x01" + data).digest()[:32]


def test_hash_determinism_and_length():
    a = hash_message(SALT, b"abc", SUPERTUBOS)
    assert a == hash_message(SALT, b"abc", SUPERTUBOS)
    assert a != hash_message(SALT, b"abd", SUPERTUBOS)
    assert a.length == 2887
    assert hash_message(SALT, b"", TOY48).length == 18


def test_known_answers():
    v = hash_message(SALT, b"", SUPERTUBOS)
    assert hashlib.sha256(to_compact(v)).hexdigest() == \
        "deaaf2614878607d376a834b75993f82ed9fe2c827d93ee9b44c0e1f6e6ad9c6"
    assert "".join(map(str, v.to_trits()[:30])) == "202212112110121010021101020102"
    toy = hash_message(SALT, b"", TOY48)
    assert "".join(map(str, toy.to_trits())) == "202212112110121010"


def test_xof_stream_is_a_prefix_reader():
    x = XofStream(b"abc", initial=4)
    chunks = [x.read(3) for _ in range(100)]
    assert b"".join(chunks) == hashlib.shake_256(b"abc").digest(300)
    assert x.consumed == 300


@pytest.mark.parametrize("bound", [1, 2, 3, 6, 7, 255, 256, 257, 10 ** 6])
def test_uniform_below_range(bound):
    x = XofStream(b"u%d" % bound)
    assert all(0 <= x.uniform_below(bound) < bound for _ in range(200))

import numpy as np
import pytest

from wavelet.f3core import TritVector, weight
from wavelet.f3linalg import syndrome_mul
from wavelet.keygen import serialize_pk
from wavelet.params import TOY48, tables_for
from wavelet.signer import Signature, sign, signer_rng, uv_syndrome, wave_sign_full
from wavelet.thash import XofStream, hash_message
from wavelet.verifier import (FileRowSource, MalformedSignature, MemoryRowSource, s_hat,
                              reconstruct_error, verify, verify_report, wave_verify)


def _messages(count, seed=b"msgs"):
    rng = XofStream(seed)
    return [rng.read(1 + rng.uniform_below(40)) for _ in range(count)]


def test_uv_syndrome_matches_matrix(toy_key):
    sk = toy_key[0]
    H = sk.parity_check()
    rng = np.random.default_rng(0)
    for _ in range(100):
        y = TritVector.from_trits(rng.integers(0, 3, TOY48.n))
        assert uv_syndrome(sk, y) == syndrome_mul(y, H)


def test_full_signature_postconditions(toy_key, toy_tables):
    sk, _, classic = toy_key
    rng = XofStream(b"full")
    for m in _messages(200):
        e, salt = wave_sign_full(m, sk, toy_tables, rng)
        assert weight(e) == TOY48.w
        assert syndrome_mul(e, classic) == hash_message(salt, m, TOY48)
        assert wave_verify(m, e, salt, classic, TOY48)


def test_truncation_matches_sign(toy_key, toy_tables):
    sk = toy_key[0]
    e, salt = wave_sign_full(b"abc", sk, toy_tables, XofStream(b"same"))
    sig = sign(b"abc", sk, toy_tables, XofStream(b"same"))
    assert sig.salt == salt
    assert np.array_equal(sig.s.to_trits(), e.to_trits()[TOY48.r:])


@pytest.mark.parametrize("which", ["toy_key", "toy60_key"])
def test_roundtrip_and_cross_verifier(which, request):
    sk, pk, classic = request.getfixturevalue(which)
    params = sk.params
    tables = tables_for(params)
    rng = XofStream(b"roundtrip" + which.encode())
    for m in _messages(300, which.encode()):
        sig = sign(m, sk, tables, rng)
        assert sig.s.length == params.k
        assert verify(m, sig, pk)
        e = reconstruct_error(m, sig, classic, params)
        assert wave_verify(m, e, sig.salt, classic, params)


def test_fresh_salts(toy_key, toy_tables):
    sk = toy_key[0]
    a = sign(b"same", sk, toy_tables)
    b = sign(b"same", sk, toy_tables)
    assert a.salt != b.salt
    assert len(signer_rng().read(32)) == 32


def test_tamper_single_trit(toy_key, toy_tables):
    sk, pk, classic = toy_key
    rng = XofStream(b"tamper")
    valid = 0
    trials = 10 ** 4
    agree = 0
    for i in range(trials):
        m = b"tamper %d" % (i % 50)
        if i % 50 == 0:
            sig = sign(m, sk, toy_tables, rng)
        t = sig.s.to_trits().copy()
        j = rng.uniform_below(t.size)
        t[j] = (t[j] + 1 + rng.uniform_below(2)) % 3
        bad = Signature(sig.salt, TritVector.from_trits(t))
        verdict = verify(m, bad, pk)
        valid += verdict
        if i < 1000:
            e = reconstruct_error(m, bad, classic, TOY48)
            agree += verdict == wave_verify(m, e, bad.salt, classic, TOY48)
    assert valid / trials <= 0.001
    assert agree == 1000


def test_random_salt_forgery_rate_matches_prediction(toy_key, toy_tables):
    # a fresh salt makes x uniform over F3^(n-k); the forgery is accepted
    # exactly when |x| = w - |s|
    from math import comb
    sk, pk, _ = toy_key
    p = TOY48
    rng = XofStream(b"salts")
    hits = 0
    expected = 0.0
    variance = 0.0
    for i in range(40):
        m = b"salt %d" % i
        sig = sign(m, sk, toy_tables, rng)
        need = p.w - weight(sig.s)
        prob = comb(p.r, need) * 2 ** need / 3 ** p.r if 0 <= need <= p.r else 0.0
        for _ in range(250):
            hits += verify(m, Signature(rng.read(32), sig.s), pk)
            expected += prob
            variance += prob * (1 - prob)
    assert abs(hits - expected) < 5 * variance ** 0.5 + 1


def test_wave_verify_rejections(toy_key, toy_tables):
    sk, _, classic = toy_key
    e, salt = wave_sign_full(b"m", sk, toy_tables, XofStream(b"wv"))
    assert not wave_verify(b"m", TritVector.zeros(TOY48.n), salt, classic, TOY48)
    assert not wave_verify(b"m", e, bytes(32), classic, TOY48)
    assert not wave_verify(b"other", e, salt, classic, TOY48)
    with pytest.raises(MalformedSignature):
        wave_verify(b"m", TritVector.zeros(5), salt, classic, TOY48)


def test_wrong_length_signature(toy_key):
    pk = toy_key[1]
    with pytest.raises(MalformedSignature):
        verify(b"m", Signature(bytes(32), TritVector.zeros(TOY48.k - 1)), pk)
    with pytest.raises(ValueError):
        Signature(bytes(31), TritVector.zeros(TOY48.k))


def test_row_op_counts(toy_key):
    pk = toy_key[1]
    k = TOY48.k
    assert verify_report(b"m", Signature(bytes(32), TritVector.zeros(k)), MemoryRowSource(pk)).row_ops == 0
    paired = TritVector.from_trits([1, 1] * (k // 2))
    rep = verify_report(b"m", Signature(bytes(32), paired), MemoryRowSource(pk))
    assert rep.row_ops == k // 2 == (k + 1) // 2
    assert rep.weight_s_hat == int(np.count_nonzero(s_hat(paired.to_trits())))


def test_streaming_source(toy_key, toy_tables, tmp_path):
    sk, pk, _ = toy_key
    path = tmp_path / "pk.bin"
    path.write_bytes(serialize_pk(pk))
    rng = XofStream(b"stream")
    with FileRowSource(path) as src:
        src.track = True
        for m in _messages(50, b"stream"):
            sig = sign(m, sk, toy_tables, rng)
            a = verify_report(m, sig, MemoryRowSource(pk))
            src.requested.clear()
            b = verify_report(m, sig, src)
            assert a.valid and b.valid and a.row_ops == b.row_ops
            assert all(x < y for x, y in zip(src.requested, src.requested[1:]))
            bad = Signature(bytes(32), sig.s)
            assert verify_report(m, bad, src).valid == verify_report(m, bad, MemoryRowSource(pk)).valid

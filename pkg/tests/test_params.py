import gzip
from fractions import Fraction

import pytest

import refcheck
from wavelet.params import (ONE, SUPERTUBOS, TOY48, TOY60, Categorical, ConfigError, ParamSet,
                            TableDomainError, binom_row, compute_f_U_row,
                            compute_f_V, compute_rejection_tables, decimal_to_fixed, dump_tables,
                            fixed_to_decimal, get_params, load_tables, q1, q1_unif, q2, q2_unif,
                            tables_for)
from wavelet.thash import XofStream
from math import comb

# small synthetic sets for exact comparisons
SYN8 = ParamSet("syn8", 0xF0, 16, 8, 6, 4, 2, 2, 0, t_min=0, t_max=4)
SYN20 = ParamSet("syn20", 0xF1, 16, 20, 16, 9, 5, 4, 1, t_min=0, t_max=10)
SYN30 = ParamSet("syn30", 0xF2, 16, 30, 24, 14, 8, 6, 2, t_min=3, t_max=13)


def test_supertubos_registry():
    p = get_params("supertubos")
    assert p is SUPERTUBOS and get_params(0x01) is p
    assert (p.n, p.w, p.k, p.k_U, p.k_V, p.d) == (8492, 7980, 5605, 3558, 2047, 81)
    assert p.k_U + p.k_V == 5605
    assert p.n - p.k == 2887
    assert (p.t_min, p.t_max) == (1953, 2745)


def test_supertubos_weight_relation_not_enforced():
    p = SUPERTUBOS
    assert 3 * p.w != 6 * p.k_U + 2 * (p.n - 2 * p.k_U)
    assert not p.insecure_toy
    p.check()


def test_toy_sets():
    assert 3 * 44 == 6 * 18 + 2 * (48 - 36)
    assert get_params("toy48") is TOY48 and get_params(0x10) is TOY48
    assert (TOY48.k, TOY48.r) == (30, 18)
    assert TOY60.k % 2 == 1
    for p in (TOY48, TOY60):
        assert 3 * p.w == 6 * p.k_U + 2 * (p.n - 2 * p.k_U)


def test_bad_configs():
    with pytest.raises(ConfigError):
        ParamSet("bad", 0xF3, 16, 48, 44, 31, 18, 12, 2).check()
    with pytest.raises(ConfigError):
        ParamSet("bad", 0xF3, 16, 48, 40, 30, 18, 12, 2, insecure_toy=True).check()
    with pytest.raises(ConfigError):
        get_params("nope")


def test_binom_row():
    assert binom_row(10, 3, 7) == [comb(10, j) for j in range(3, 8)]
    assert binom_row(4246, 1990, 2010) == [comb(4246, j) for j in range(1990, 2011)]
    assert binom_row(5, 6, 9) == []


def test_categorical():
    cat = Categorical({1: 1, 4: 3, 7: 0})
    assert cat.values == [1, 4]
    assert cat.prob(4) == Fraction(3, 4) and cat.prob(7) == 0
    rng = XofStream(b"cat")
    draws = [cat.sample(rng) for _ in range(4000)]
    assert set(draws) == {1, 4}
    assert abs(draws.count(4) / 4000 - 0.75) < 5 * (0.75 * 0.25 / 4000) ** 0.5


def _uniform_p_U(params):
    out = {}
    for t in range(params.t_min, params.t_max + 1):
        lo, hi = params.k_range(t)
        if lo <= hi:
            out[t] = Categorical({k: k + 1 for k in range(lo, hi + 1)})
    return out


@pytest.mark.parametrize("params", [SYN8, SYN20, SYN30])
def test_q1_matches_exact_oracle(params):
    p_V = Categorical({l: l + 2 for l in range(params.kV_free + 1)})
    p_dict = {l: p_V.prob(l) for l in p_V.values}
    tot_u = tot = 0
    for i in range(params.half + 1):
        assert q1_unif(params, i) == refcheck.q1_unif(params.n, params.w, i)
        assert q1(params, p_V, i) == refcheck.q1(params.n, params.kV_free, p_dict, i)
        tot_u += q1_unif(params, i)
        tot += q1(params, p_V, i)
    assert tot_u == 1 and tot == 1


@pytest.mark.parametrize("params", [SYN8, SYN20, SYN30])
def test_q2_matches_exact_oracle(params):
    p_U = _uniform_p_U(params)
    for t, cat in p_U.items():
        p_dict = {k: cat.prob(k) for k in cat.values}
        tot_u = tot = 0
        for s in range(params.n + 1):
            ref_u = refcheck.q2_unif(params.n, params.w, s, t) if t <= params.half else 0
            assert q2_unif(params, s, t) == ref_u
            assert q2(params, cat, s, t) == refcheck.q2(params.n, params.w, params.kU_free, p_dict, s, t)
            tot_u += ref_u
            tot += q2(params, cat, s, t)
        assert tot_u in (0, 1)
        assert tot in (0, 1)


def _exact_f(pairs):
    """Normalise exact ratios by their maximum."""
    m = max(pairs.values())
    return {i: v / m for i, v in pairs.items()}


def test_f_tables_match_exact_ratios():
    params = SYN30
    p_V = Categorical({l: 1 + l * l for l in range(params.kV_free + 1)})
    f_V = compute_f_V(params, p_V)
    ratios = {}
    for t in range(params.t_min, params.t_max + 1):
        a, b = q1_unif(params, t), q1(params, p_V, t)
        if a and b:
            ratios[t] = a / b
    exact = _exact_f(ratios)
    assert set(f_V) == set(exact)
    for t, f in f_V.items():
        assert 0 <= f <= ONE
        assert abs(Fraction(f, ONE) - exact[t]) <= Fraction(1, ONE)
    assert max(f_V.values()) == ONE

    for t, cat in _uniform_p_U(params).items():
        row = compute_f_U_row(params, cat, t)
        ratios = {}
        for s in range(params.n - params.w + 1):
            a, b = q2_unif(params, s, t), q2(params, cat, s, t)
            if a and b:
                ratios[s] = a / b
        if not ratios:
            assert row == {}
            continue
        exact = _exact_f(ratios)
        assert set(row) == set(exact)
        for s, f in row.items():
            assert abs(Fraction(f, ONE) - exact[s]) <= Fraction(1, ONE)
        assert max(row.values()) == ONE


def test_fixed_decimal_roundtrip():
    for x in (0, 1, ONE // 3, ONE - 1, ONE, 12345678901234567890123456789):
        assert decimal_to_fixed(fixed_to_decimal(x)) == x
    with pytest.raises(ConfigError):
        decimal_to_fixed("1.5")
    with pytest.raises(ConfigError):
        decimal_to_fixed("abc")


def _synthetic_tables():
    params = SYN30
    p_V = Categorical({l: ONE // (params.kV_free + 1) for l in range(params.kV_free + 1)})
    return compute_rejection_tables(params, p_V, _uniform_p_U(params))


def test_table_file_roundtrip(tmp_path):
    tables = _synthetic_tables()
    tables.check_domains()
    for name in ("t.txt", "t.txt.gz"):
        path = tmp_path / name
        dump_tables(tables, path)
        again = load_tables(path, SYN30)
        assert again.f_V == tables.f_V and again.f_U == tables.f_U
        dump_tables(again, tmp_path / ("b" + name))
        opener = gzip.open if name.endswith(".gz") else open
        with opener(path, "rb") as f1, opener(tmp_path / ("b" + name), "rb") as f2:
            assert f1.read() == f2.read()


def test_truncated_and_bad_table_files(tmp_path):
    path = tmp_path / "t.txt"
    dump_tables(_synthetic_tables(), path)
    lines = path.read_text().splitlines()
    (tmp_path / "cut.txt").write_text("\n".join(lines[:len(lines) // 2]) + "\n")
    with pytest.raises(ConfigError):
        load_tables(tmp_path / "cut.txt", SYN30)
    (tmp_path / "bad.txt").write_text("[p_V]\n0 1.5\n[end]\n")
    with pytest.raises(ConfigError):
        load_tables(tmp_path / "bad.txt", SYN30)
    (tmp_path / "out.txt").write_text("[p_V]\n0 1.0\n[f_V]\n99 0.5\n[end]\n")
    with pytest.raises(ConfigError):
        load_tables(tmp_path / "out.txt", SYN30)


def test_toy_tables_always_accept():
    tables = tables_for(TOY48)
    rng = XofStream(b"toy")
    assert tables.always_accept
    for t in range(TOY48.half + 1):
        assert tables.accept_v(t, rng)
    for t, cat in tables.p_U.items():
        lo, hi = TOY48.k_range(t)
        assert cat.values == list(range(lo, hi + 1))


def test_supertubos_tables(big_tables):
    T = big_tables
    p = SUPERTUBOS
    T.check_domains()
    assert all(0 <= f <= ONE for f in T.f_V.values())
    assert all(0 <= f <= ONE for row in T.f_U.values() for f in row.values())
    assert set(T.f_U) == set(range(p.t_min, p.t_max + 1))
    assert max(T.f_V.values()) == ONE
    assert all(max(row.values()) == ONE for row in T.f_U.values())
    # spot checks against a fresh computation from the stored inputs
    assert compute_f_V(p, T.p_V) == T.f_V
    for t in (p.t_min, 2356, p.t_max):
        assert compute_f_U_row(p, T.p_U[t], t) == T.f_U[t]


def test_supertubos_acceptance_reproducible(big_tables):
    a = [big_tables.accept_v(t, XofStream(b"acc%d" % t)) for t in range(1953, 2746, 7)]
    b = [big_tables.accept_v(t, XofStream(b"acc%d" % t)) for t in range(1953, 2746, 7)]
    assert a == b
    rng = XofStream(b"draws")
    assert all(0 <= big_tables.sample_v(rng) <= SUPERTUBOS.kV_free for _ in range(200))
    for t in (1953, 2300, 2745):
        lo, hi = SUPERTUBOS.k_range(t)
        assert all(lo <= big_tables.sample_u(t, rng) <= hi for _ in range(50))
    with pytest.raises(TableDomainError):
        big_tables.accept_u(0, 10, rng)
    with pytest.raises(TableDomainError):
        big_tables.sample_u(10, rng)
    assert big_tables.acceptance_v() > Fraction(9, 10)

import pytest
from hypothesis import given, settings, strategies as st

import oracle
from deltasieve import equilibrium_anchor, equilibrium_table, gec_growth, jump_factor
from deltasieve.equilibrium import (constants_of, count_gec, delta_side_dials, equilibrium_csv,
                                    gec_csv)
from deltasieve.errors import ConfigurationError, UnsupportedDeltaError
from deltasieve.trapdoor import sum_series_factor_pair

TABLE_20 = [0, -2, -10, -26, -50, -82, -122, -170, -226, -290]
TABLE_22 = [1, 1, -3, -15, -35, -63, -99, -143, -195]


@pytest.mark.parametrize("delta, parity, n_anchor, od6", [
    (20, "odd", 99, 99),
    (22, "odd", 121, 120),
    (20, "even", 100, 99),
    (22, "even", 120, 120),
])
def test_anchor(delta, parity, n_anchor, od6):
    a = equilibrium_anchor(delta, parity)
    assert (a.n_anchor, a.od6_ssv) == (n_anchor, od6)


def test_anchor_needs_even_delta():
    with pytest.raises(UnsupportedDeltaError):
        equilibrium_anchor(21)
    with pytest.raises(UnsupportedDeltaError):
        equilibrium_anchor(2)


def test_sum_series_pair_of_anchor():
    assert sum_series_factor_pair(99, 20) == (9, 11)


def test_constants_delta20():
    rows = equilibrium_table(20, 10)
    assert [r.constant for r in rows] == TABLE_20
    assert [r.df for r in rows[1:]] == [2, 8, 16, 24, 32, 40, 48, 56, 64]
    assert rows[0].df is None
    assert (rows[0].n_sum, rows[0].od6_delta) == (99, 99)
    for r in rows:
        assert r.constant == r.n_sum - r.od6_delta


def test_constants_delta40_prefix():
    assert constants_of(40)[:10] == TABLE_20


def test_constants_delta22():
    assert constants_of(22)[:9] == TABLE_22


def test_od6_side_matches_oracle():
    dials = delta_side_dials(22, "odd").as_tuple()
    rows = equilibrium_table(22)
    first_p = equilibrium_anchor(22).first_steady_p
    expected = [oracle.decks(p * (p + 22), dials)[6] for p in range(first_p, 0, -2)]
    assert [r.od6_delta for r in rows] == expected


def test_table_length_truncates():
    assert len(equilibrium_table(20, 3)) == 3
    assert len(equilibrium_table(20, 10 ** 6)) == len(equilibrium_table(20))


def test_csv_layouts():
    text = equilibrium_csv(equilibrium_table(20, 2))
    assert text == "n_sum,od6_delta,constant,df\n99,99,0,\n91,93,-2,2\n"
    stats = gec_growth(20, 24)
    assert gec_csv(stats).splitlines()[0] == "delta,gec,nce,residue"


def test_gec_delta20_24():
    (s,) = gec_growth(20, 24)
    assert s.delta == 24 and s.gec >= 1
    assert s.total == len(constants_of(24))
    assert s.residue == s.total - 2 * s.gec


def test_gec_full_prefix_shared():
    a, b = constants_of(20), constants_of(40)
    assert a[:10] == b[:10] == TABLE_20
    assert count_gec(a, b) >= 10


def test_gec_single_delta():
    assert gec_growth(20, 20) == []
    with pytest.raises(ConfigurationError):
        gec_growth(20, 26)
    with pytest.raises(ConfigurationError):
        count_gec([1], [1], mode="fuzzy")


def test_gec_multiset_mode():
    assert count_gec([1, 2, 2, 3], [2, 2, 5, 1], "multiset") == 3
    assert count_gec([1, 2, 2, 3], [2, 2, 5, 1], "position") == 1


@pytest.mark.parametrize("parity", ["odd", "even"])
def test_constants_invariant_under_plus_twenty(parity):
    for delta in range(4, 181, 2):
        a, b = constants_of(delta, parity), constants_of(delta + 20, parity)
        short = min(len(a), len(b))
        assert a[:short] == b[:short], delta


def test_jump_factor_examples():
    hit = jump_factor(2501, [0])
    assert (hit.p, hit.q, hit.delta) == (41, 61, 20)
    hit = jump_factor(3723, [1])
    assert (hit.p, hit.q, hit.delta) == (51, 73, 22)
    assert jump_factor(3723, [-999]) is None
    with pytest.raises(ConfigurationError):
        jump_factor(3723, [])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.sampled_from([0, 2]), st.sampled_from(["odd", "even"]))
def test_gec_nce_total(k, mod4, parity):
    start = 4 * k + mod4 + 4
    for s in gec_growth(start, start + 12, parity):
        assert s.gec + s.nce == s.total == len(constants_of(s.delta, parity))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 500), st.sampled_from(["odd", "even"]))
def test_anchor_is_top_of_sum_series(half, parity):
    delta = 2 * half
    a = equilibrium_anchor(delta, parity)
    p, q = sum_series_factor_pair(a.n_anchor, delta)
    assert p * q == a.n_anchor and p + q == delta
    assert a.n_anchor - a.od6_ssv in (0, 1)

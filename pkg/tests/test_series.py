import pytest
from hypothesis import given, settings, strategies as st

import oracle
from deltasieve import DialPair, SeriesSpec, compute_row, generate, integer_sqrt_floor, resolve_dials
from deltasieve.errors import ConfigurationError, DomainError
from deltasieve.series import (CSV_HEADER, deck_values, parse_deck, reconstruct_from_df,
                               rows_to_csv)

BASE = DialPair(0, -1, 2, 2)
ALT = DialPair(-1, 0, 2, 2)


@pytest.mark.parametrize("n, root", [(0, 0), (1, 1), (16, 4), (17, 4), (219781, 468)])
def test_integer_sqrt_floor(n, root):
    assert integer_sqrt_floor(n) == root


def test_integer_sqrt_floor_rejects_negative():
    with pytest.raises(DomainError):
        integer_sqrt_floor(-1)


def test_integer_sqrt_floor_big():
    n = 3 ** 400 + 12345
    r = integer_sqrt_floor(n)
    assert r * r <= n < (r + 1) ** 2


@pytest.mark.parametrize("n, dials, expected", [
    (137, DialPair(-1, 1, 2, 4), (12, 14)),
    (147, DialPair(-1, 1, 2, 4), (11, 15)),
    (13, BASE, (2, 4)),
])
def test_resolve_dials(n, dials, expected):
    assert resolve_dials(n, dials) == expected


def test_dial_parse_and_display():
    d = DialPair.parse("{0,-1,2,2}")
    assert d == BASE
    assert str(d) == "{0,-1,2,2}"
    assert DialPair.parse("-1, 0, 6, 6").as_tuple() == (-1, 0, 6, 6)
    with pytest.raises(ConfigurationError):
        DialPair.parse("1,2,3")
    with pytest.raises(ConfigurationError):
        DialPair.parse("a,b,c,d")


def test_parse_deck_forms():
    assert parse_deck("od4") == 4
    assert parse_deck(11) == 11
    with pytest.raises(ConfigurationError):
        parse_deck("od12")


def test_compute_row_first_row():
    spec = SeriesSpec("delta", 12, "odd", (BASE,))
    row = compute_row(spec, 1)
    assert (row.od[1], row.od[2], row.od[3], row.od[4], row.od[6]) == (-9, 3, 12, -6, 5)
    assert all(v == 0 for v in row.df.values())


def test_compute_row_even_p():
    spec = SeriesSpec("delta", 22, "even", (BASE,))
    row = compute_row(spec, 50)
    assert row.id == 25
    assert (row.od[4], row.od[6]) == (244, 120)


def test_compute_row_sum_series():
    spec = SeriesSpec("sum", 22, "odd", (ALT,))
    row = compute_row(spec, 11)
    assert (row.n, row.od[1], row.od[2], row.od[6]) == (121, 0, 48, 22)
    assert row.id == 6


def test_compute_row_parity_guard():
    spec = SeriesSpec("delta", 12, "odd", (BASE,))
    with pytest.raises(ConfigurationError):
        compute_row(spec, 2)


def test_od4_column():
    rows = generate(SeriesSpec("delta", 12, "odd", (BASE,)), 8)
    assert [r.od[4] for r in rows] == [-6, 10, -6, -22, -38, -54, 74, 74]


def test_od5_steady_run():
    rows = generate(SeriesSpec("delta", 46, "odd", (DialPair(-1, -2, 4, 4),)), 60)
    assert [r.od[5] for r in rows[55:60]] == [2128] * 5


def test_sum_series_od6_and_exhaustion():
    rows = generate(SeriesSpec("sum", 20, "odd", (ALT,)), 50)
    assert len(rows) == 10
    assert [r.od[6] for r in rows] == [4, 12, 12, 8, 0, 0, 8, 12, 12, 4]


def test_sum_series_zero_q_row():
    rows = generate(SeriesSpec("sum", 20, "even", (ALT,)), 20)
    last = rows[-1]
    assert (last.p, last.q, last.n, last.isqrt_n, last.d1) == (20, 0, 0, 0, -1)


def test_steady_stop_rule():
    spec = SeriesSpec("delta", 12, "odd", (BASE,))
    rows = generate(spec, 100, stop_deck=4)
    assert [r.id for r in rows][-3:] == [7, 8, 9]
    assert len(generate(spec, 100, stop_deck=4, stop_k=5)) == 11


def test_generate_needs_a_limit():
    with pytest.raises(ConfigurationError):
        generate(SeriesSpec("delta", 12), None)


def test_second_pair_decks():
    spec = SeriesSpec("delta", 94, "odd", (DialPair(0, -1, 6, 6), DialPair(-2, 1, 16, 16)))
    row = compute_row(spec, 59)
    assert set(row.od) == set(range(1, 12))
    assert row.od == oracle.decks(row.n, (0, -1, 6, 6), (-2, 1, 16, 16))
    with pytest.raises(ConfigurationError):
        SeriesSpec("delta", 94, decks={9})


def test_first_id_offset_keeps_df():
    spec = SeriesSpec("delta", 22, "odd", (ALT,))
    whole = generate(spec, 30)
    tail = generate(spec, 5, first_id=26)
    assert [(r.id, r.od, r.df) for r in tail] == [(r.id, r.od, r.df) for r in whole[25:30]]


def test_csv_header_and_empty_cells():
    rows = generate(SeriesSpec("delta", 12, "odd", (BASE,), decks={1, 4}), 2)
    lines = rows_to_csv(rows).splitlines()
    assert lines[0].split(",") == CSV_HEADER
    cells = lines[2].split(",")
    assert cells[:7] == ["2", "3", "15", "45", "6", "6", "8"]
    assert cells[7] == "-9" and cells[8] == "" and cells[10] == "10"
    assert cells[18] == "0" and cells[21] == "-16"


def test_undefined_od6_cell():
    od = deck_values(50, DialPair(0, -1, 2, 4))
    assert od[6] is None or isinstance(od[6], int)
    spec = SeriesSpec("delta", 12, "odd", (DialPair(0, -1, 2, 4),), decks={6})
    text = rows_to_csv(generate(spec, 12))
    for line in text.splitlines()[1:]:
        cell = line.split(",")[12]
        assert cell == "undefined" or cell.lstrip("-").isdigit()


dial_pairs = st.tuples(st.integers(-3, 3), st.integers(-3, 3),
                       st.integers(-8, 8).filter(bool), st.integers(-8, 8).filter(bool))


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10 ** 30), dial_pairs)
def test_deck_identities(n, dials):
    od = deck_values(n, DialPair(*dials))
    assert od[3] == od[2] - od[1]
    assert od[4] == od[2] + od[1]
    assert od[5] == od[1] + od[2] + od[3] + od[4]
    assert {k: od[k] for k in range(1, 7)} == oracle.decks(n, dials)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 2000), st.integers(1, 400), st.integers(2, 40))
def test_df_chain_reconstructs(delta, p0, rows):
    spec = SeriesSpec("delta", delta, "odd" if p0 % 2 else "even", (ALT,), p_start=p0)
    generated = generate(spec, rows)
    for a, b in zip(generated, generated[1:]):
        for k, value in b.od.items():
            if value is not None and a.od[k] is not None:
                assert value + b.df[k] == a.od[k]
    defined = [k for k in range(1, 6)]
    first = {k: generated[0].od[k] for k in defined}
    rebuilt = reconstruct_from_df(first, [{k: r.df[k] for k in defined} for r in generated[1:]])
    assert rebuilt == [{k: r.od[k] for k in defined} for r in generated]


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 300))
def test_sum_series_is_palindromic(sigma):
    for parity in ("odd", "even"):
        if sigma % 2 and parity == "even":
            continue
        rows = generate(SeriesSpec("sum", sigma, parity, (ALT,)), sigma)
        by_p = {r.p: r for r in rows}
        for r in rows:
            mirror = by_p.get(sigma - r.p)
            if mirror is not None:
                assert mirror.n == r.n and mirror.od == r.od


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 500), dial_pairs)
def test_generation_is_deterministic(delta, dials):
    spec = SeriesSpec("delta", delta, "odd", (DialPair(*dials),))
    assert rows_to_csv(generate(spec, 20)) == rows_to_csv(generate(spec, 20))

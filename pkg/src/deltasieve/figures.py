"""Datasets behind the figures, as CSV text. No rendering happens here."""

from __future__ import annotations

import csv
import io

from .equilibrium import delta_side_dials, gec_growth
from .errors import ConfigurationError
from .series import DialPair, SeriesSpec, generate
from .steady_state import WIDE_DIALS
from .zones import coverage_report, criterion_for, default_horizon, detect_zones

FIGURES = ("coverage-growth", "rsa-unsafe-zone", "a-graph", "gec-growth", "residue")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def coverage_growth(deltas=(160, 480), dials=(WIDE_DIALS,), decks=(1, 2, 4, 5)) -> tuple[str, dict]:
    """Per-zone coverage for each Δ plus a total row; returns (csv, {Δ: total})."""
    rows, totals = [], {}
    for delta in deltas:
        report = coverage_report(delta, dials, decks)
        for z in report.zones:
            rows.append([delta, z.deck_name, z.zone_index, z.id_start,
                         "inf" if z.id_end is None else z.id_end,
                         "inf" if z.coverage is None else z.coverage])
        totals[delta] = report.total_coverage()
        rows.append([delta, "total", "", "", "", totals[delta]])
    return _csv(["delta", "deck", "zone_index", "id_start", "id_end", "coverage"], rows), totals


def rsa_unsafe_zone(delta: int = 1002, base: DialPair = DialPair(0, -1, 8, 8),
                    iterations: int = 4, step: int = 8) -> str:
    """p ranges covered by od4/od5 zones as v grows by `step` from the base dials."""
    rows = []
    horizon = default_horizon(delta)
    for i in range(iterations):
        v = base.v1 + step * i
        dials = base.with_v(v)
        spec = SeriesSpec("delta", delta, "odd", (dials,), decks={1, 2, 3, 4, 5})
        generated = generate(spec, horizon)
        for deck in (4, 5):
            zones, _ = detect_zones(generated, criterion_for(deck))
            for z in zones:
                end = generated[-1].id if z.id_end is None else z.id_end
                rows.append([v, f"od{deck}", z.id_start, "inf" if z.id_end is None else end,
                             spec.p_at(z.id_start), "inf" if z.id_end is None else spec.p_at(end)])
    return _csv(["v", "deck", "id_start", "id_end", "p_start", "p_end"], rows)


def a_graph(deltas=(20,), v: int = 2, p_parity: str = "odd") -> str:
    """(n, od6) for each Δ from the first row up to the start of its terminal od6 run."""
    rows = []
    for delta in deltas:
        base = delta_side_dials(delta, p_parity) if delta % 2 == 0 else DialPair(-1, 0, 2, 2)
        dials = base.with_v(v)
        spec = SeriesSpec("delta", delta, p_parity, (dials,))
        generated = generate(spec, default_horizon(delta))
        end = len(generated) - 1
        while end > 0 and generated[end - 1].od[6] == generated[end].od[6]:
            end -= 1
        for r in generated[:end + 1]:
            rows.append([delta, v, r.id, r.n, "" if r.od[6] is None else r.od[6]])
    return _csv(["delta", "v", "id", "n", "od6"], rows)


def gec_growth_data(start: int = 20, end: int = 100, p_parity: str = "odd") -> str:
    stats = gec_growth(start, end, p_parity)
    return _csv(["delta", "gec", "nce", "residue"],
                [[s.delta, s.gec, s.nce, s.residue] for s in stats])


def residue_data(end: int = 200, p_parity: str = "odd") -> str:
    rows = []
    for start, label in ((20, "4k"), (22, "4k+2")):
        last = end - (end - start) % 4
        for s in gec_growth(start, last, p_parity):
            rows.append([label, s.delta, s.residue])
    return _csv(["class", "delta", "residue"], rows)


def figure_csv(figure: str, **options) -> str:
    if figure == "coverage-growth":
        return coverage_growth(**options)[0]
    if figure == "rsa-unsafe-zone":
        return rsa_unsafe_zone(**options)
    if figure == "a-graph":
        return a_graph(**options)
    if figure == "gec-growth":
        return gec_growth_data(**options)
    if figure == "residue":
        return residue_data(**options)
    raise ConfigurationError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")

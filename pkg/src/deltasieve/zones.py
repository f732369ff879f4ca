"""Sieve zones: runs of rows where a deck holds a constant value.

A zone is a maximal run of rows with a constant steady deck and a zero
weighted df sum after its first row. The first row usually has a non-zero
sum and is reported as the switchover row of that zone.
"""

from __future__ import annotations

import csv
import io
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ConfigurationError
from .series import DialPair, SeriesRow, SeriesSpec, generate, parse_deck
from .steady_state import DEFAULT_REGISTRY, SteadyStateRegistry


@dataclass(frozen=True)
class ZoneCriterion:
    terms: tuple
    steady_deck: int

    def __post_init__(self):
        terms = tuple((parse_deck(d), int(a)) for d, a in self.terms)
        if not any(a for _, a in terms):
            raise ConfigurationError("a zone criterion needs a non-zero coefficient")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "steady_deck", parse_deck(self.steady_deck))

    @property
    def decks(self) -> set:
        return {d for d, _ in self.terms} | {self.steady_deck}

    def weighted_df(self, row: SeriesRow) -> int | None:
        total = 0
        for deck, a in self.terms:
            value = row.df.get(deck)
            if value is None:
                return None
            total += a * value
        return total


OD4_CRITERION = ZoneCriterion(((1, 1), (2, 1)), 4)
OD5_CRITERION = ZoneCriterion(((1, 1), (2, 1), (3, 1), (4, 1)), 5)


def criterion_for(deck) -> ZoneCriterion:
    """Default criterion for a deck: the canonical sums for od4/od5, its own df otherwise."""
    deck = parse_deck(deck)
    if deck == 4:
        return OD4_CRITERION
    if deck == 5:
        return OD5_CRITERION
    return ZoneCriterion(((deck, 1),), deck)


@dataclass
class ZoneReport:
    steady_deck: int
    zone_index: int
    id_start: int
    id_end: int | None
    steady_value: int
    coverage: int | None
    label: str = ""
    form_id: str = "unregistered"

    @property
    def is_open(self) -> bool:
        return self.id_end is None

    @property
    def deck_name(self) -> str:
        return self.label or f"od{self.steady_deck}"


@dataclass(frozen=True)
class SwitchoverMark:
    kind: str
    id: int
    deck: int
    df_anomaly: int


def _runs(rows: Sequence[SeriesRow], criterion: ZoneCriterion, min_length: int):
    deck = criterion.steady_deck
    runs = []
    start = 0
    count = len(rows)
    while start < count:
        value = rows[start].od.get(deck)
        end = start
        while value is not None and end + 1 < count:
            nxt = rows[end + 1]
            if nxt.od.get(deck) != value or criterion.weighted_df(nxt) != 0:
                break
            end += 1
        if value is not None and end - start + 1 >= min_length:
            runs.append((start, end))
        start = end + 1
    return runs


def detect_zones(rows: Sequence[SeriesRow], criterion: ZoneCriterion, *,
                 min_length: int = 2, open_ended: bool = True):
    """Zones and switchover-zone marks for one criterion.

    With open_ended, a zone reaching the last row is taken as zone₀ and left
    open; earlier zones are numbered by how far they sit before it.
    """
    if not rows:
        return [], []
    missing = [d for d in criterion.decks if d not in rows[0].od]
    if missing:
        raise ConfigurationError(f"criterion needs decks {missing} which were not evaluated")
    for a, b in zip(rows, rows[1:]):
        if b.id != a.id + 1:
            raise ConfigurationError("rows must be contiguous in id")
    deck = criterion.steady_deck
    runs = _runs(rows, criterion, min_length)
    last = len(rows) - 1
    terminal = open_ended and bool(runs) and runs[-1][1] == last
    zones, marks = [], []
    total = len(runs)
    for pos, (s, e) in enumerate(runs):
        is_terminal = terminal and pos == total - 1
        index = 0 if is_terminal else (total - pos - 1 if terminal else total - pos)
        first = rows[s]
        zones.append(ZoneReport(
            deck, index, first.id, None if is_terminal else rows[e].id,
            first.od[deck], None if is_terminal else e - s + 1))
        anomaly = criterion.weighted_df(first)
        if anomaly:
            marks.append(SwitchoverMark("zone", first.id, deck, anomaly))
    return zones, marks


def find_switchover_points(rows: Sequence[SeriesRow]) -> list[SwitchoverMark]:
    """Rows whose |df3| is twice the most common |df3| (a heuristic; ties pick the smaller step)."""
    if len(rows) < 3:
        return []
    steps = [abs(r.df[3]) for r in rows[1:] if r.df.get(3) is not None]
    if not steps:
        return []
    counts = Counter(steps)
    top = max(counts.values())
    modal = min(s for s, c in counts.items() if c == top)
    if modal == 0:
        return []
    return [SwitchoverMark("point", r.id, 3, r.df[3]) for r in rows[1:]
            if r.df.get(3) is not None and abs(r.df[3]) == 2 * modal]


def default_horizon(delta: int) -> int:
    """Rows to scan: past the point where isqrt(n) settles to p + Δ/2 - 1 for good."""
    return max(64, delta * delta // 8 + 64)


def attach_forms(zones, delta: int, dials, parity: str,
                 registry: SteadyStateRegistry = DEFAULT_REGISTRY):
    for z in zones:
        for form in registry.select(z.steady_deck, dials, delta, parity):
            if form.value(delta) == z.steady_value:
                z.label = form.label
                z.form_id = form.form_id
                break
    return zones


@dataclass
class CoverageReport:
    delta: int
    p_parity: str
    dials: tuple
    horizon: int
    zones: list = field(default_factory=list)
    zoneless: int = 0

    def rows_for(self, name: str) -> list[ZoneReport]:
        return [z for z in self.zones if z.deck_name == name]

    def total_coverage(self) -> int:
        return sum(z.coverage for z in self.zones if z.coverage is not None)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["deck", "zone_index", "id_start", "id_end", "coverage", "steady_value", "form_id"])
        for z in self.zones:
            w.writerow([z.deck_name, z.zone_index, z.id_start,
                        "inf" if z.id_end is None else z.id_end,
                        "inf" if z.coverage is None else z.coverage,
                        z.steady_value, z.form_id])
        w.writerow(["zoneless", "", 1, self.horizon, self.zoneless, "", ""])
        return buf.getvalue()


def coverage_report(delta: int, dials, decks, *, p_parity: str = "odd",
                    horizon: int | None = None, min_length: int = 2,
                    registry: SteadyStateRegistry = DEFAULT_REGISTRY) -> CoverageReport:
    """Every zone of every requested deck over `horizon` rows, plus the zoneless count."""
    if isinstance(dials, DialPair):
        dials = (dials,)
    dials = tuple(dials)
    deck_list = sorted({parse_deck(d) for d in decks})
    horizon = horizon or default_horizon(delta)
    needed = set(deck_list) | {1, 2, 3, 4}
    spec = SeriesSpec("delta", delta, p_parity, dials, decks=needed)
    rows = generate(spec, horizon)
    zones = []
    covered = set()
    for deck in deck_list:
        found, _ = detect_zones(rows, criterion_for(deck), min_length=min_length)
        zones.extend(found)
        for z in found:
            end = z.id_end if z.id_end is not None else rows[-1].id
            covered.update(range(z.id_start, end + 1))
    attach_forms(zones, delta, dials, spec.p_parity, registry)
    zones.sort(key=lambda z: (z.id_start, z.steady_deck))
    report = CoverageReport(delta, spec.p_parity, dials, len(rows), zones)
    report.zoneless = len(rows) - len(covered)
    return report


@dataclass
class ZoneShift:
    v: int
    zone: ZoneReport | None
    zones: list


def zone_shift_scan(delta: int, base: DialPair, v_schedule: Sequence[int], deck, *,
                    p_parity: str = "odd", horizon: int | None = None,
                    registry: SteadyStateRegistry = DEFAULT_REGISTRY) -> dict:
    """Re-run zone detection with v1 = v2 = v for each v in the schedule.

    The headline zone for each v is the one whose value matches a registered
    form, falling back to the lowest zone index.
    """
    if not v_schedule:
        raise ConfigurationError("v schedule is empty")
    deck = parse_deck(deck)
    out = {}
    for v in v_schedule:
        dials = base.with_v(v)
        spec = SeriesSpec("delta", delta, p_parity, (dials,), decks={1, 2, 3, 4, 5, deck})
        rows = generate(spec, horizon or default_horizon(delta))
        zones, _ = detect_zones(rows, criterion_for(deck))
        attach_forms(zones, delta, (dials,), spec.p_parity, registry)
        registered = [z for z in zones if z.form_id != "unregistered"]
        pick = registered or sorted(zones, key=lambda z: z.zone_index)
        out[v] = ZoneShift(v, pick[0] if pick else None, zones)
    return out


@dataclass(frozen=True)
class CriterionHit:
    coefficients: tuple
    id_start: int
    id_end: int
    value: int
    trivial: bool


def _combo_values(rows, decks, coeffs):
    out = []
    for r in rows:
        total = 0
        for d, a in zip(decks, coeffs):
            if a:
                v = r.od.get(d)
                if v is None:
                    total = None
                    break
                total += a * v
        out.append(total)
    return out


def search_criteria(delta: int, dials, *, decks=(1, 2, 3, 4, 5, 6), p_parity: str = "odd",
                    rows: int = 64, coeff_range=(-2, -1, 0, 1, 2),
                    min_length: int = 3, limit: int | None = None) -> list[CriterionHit]:
    """Bounded exhaustive search for weighted deck sums that hold a constant value.

    A combination is flagged trivial when it is constant over the whole
    series for both Δ and Δ+4 (an identity among the decks rather than a zone).
    """
    deck_list = [parse_deck(d) for d in decks]
    if len(deck_list) > 6:
        raise ConfigurationError("the search is bounded to six decks")
    if isinstance(dials, DialPair):
        dials = (dials,)
    spec = SeriesSpec("delta", delta, p_parity, tuple(dials), decks=set(deck_list))
    spec4 = SeriesSpec("delta", delta + 4, p_parity, tuple(dials), decks=set(deck_list))
    base_rows = generate(spec, rows)
    plus4_rows = generate(spec4, rows)
    hits = []
    for coeffs in itertools.product(coeff_range, repeat=len(deck_list)):
        nonzero = [a for a in coeffs if a]
        if not nonzero or nonzero[0] < 0:
            continue
        values = _combo_values(base_rows, deck_list, coeffs)
        if None in values:
            continue
        trivial = len(set(values)) == 1 and len(set(_combo_values(plus4_rows, deck_list, coeffs))) == 1
        start = 0
        while start < len(values):
            end = start
            while end + 1 < len(values) and values[end + 1] == values[start]:
                end += 1
            if end - start + 1 >= min_length:
                hits.append(CriterionHit(coeffs, base_rows[start].id, base_rows[end].id,
                                         values[start], trivial))
            start = end + 1
        if limit is not None and len(hits) >= limit:
            break
    return hits

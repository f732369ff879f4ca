"""Factoring procedures built on Δ-series structure.

Everything here returns a FactorResult only after checking p * q == n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ConfigurationError, SteppingError
from .series import (BASE_DIALS_4K, BASE_DIALS_4K2, DialPair, SeriesRow, SeriesSpec,
                     deck_values, generate, parse_deck, parity_of, resolve_dials)
from .steady_state import DEFAULT_REGISTRY, SteadyStateRegistry, invert_ssv
from .zones import criterion_for, detect_zones

TRIAL_DIVISION_BOUND = 10 ** 6


@dataclass(frozen=True)
class FactorResult:
    p: int
    q: int
    delta: int
    method: str
    steps: int = 1

    def csv_row(self, n: int) -> list:
        return [n, self.p, self.q, self.delta, self.method, self.steps]


FACTOR_CSV_HEADER = ["n", "p", "q", "delta", "method", "steps"]


def _result(n: int, p: int, q: int, method: str, steps: int = 1) -> FactorResult:
    if p * q != n or p > q:
        raise AssertionError(f"unsound factorization {p} * {q} for {n}")
    return FactorResult(p, q, q - p, method, steps)


def quadratic_factor(n: int, delta: int, method: str = "quadratic") -> FactorResult | None:
    """Solve p^2 + p*delta - n = 0 over the integers."""
    if n < 1:
        raise ConfigurationError("n must be positive")
    if delta < 0:
        return None
    disc = delta * delta + 4 * n
    s = math.isqrt(disc)
    if s * s != disc or (s - delta) % 2:
        return None
    p = (s - delta) // 2
    if p < 1:
        return None
    return _result(n, p, p + delta, method)


def _zone0_probe(n: int, registry: SteadyStateRegistry) -> tuple[list[int], int]:
    found = []
    probes = 0
    for dials in (BASE_DIALS_4K, BASE_DIALS_4K2):
        od = deck_values(n, dials)
        for deck in (4, 2):
            probes += 1
            for delta in invert_ssv(deck, od[deck], dials, registry, v=2):
                if delta not in found and quadratic_factor(n, delta) is not None:
                    found.append(delta)
    return found, probes


def zone0_candidates(n: int, registry: SteadyStateRegistry = DEFAULT_REGISTRY) -> list[int]:
    """Every Δ read off od2/od4 under the two base dial pairs that passes the quadratic check."""
    if n < 1:
        raise ConfigurationError("n must be positive")
    return _zone0_probe(n, registry)[0]


def factor_zone0(n: int, registry: SteadyStateRegistry = DEFAULT_REGISTRY) -> FactorResult | None:
    """Read Δ straight off od2/od4 under the two base dial pairs.

    Works whenever n sits in zone₀ of its own Δ-series. The probe count in
    FactorResult.steps is the same for every n.
    """
    if n < 1:
        raise ConfigurationError("n must be positive")
    found, probes = _zone0_probe(n, registry)
    if not found:
        return None
    hit = quadratic_factor(n, found[0], "zone0")
    return FactorResult(hit.p, hit.q, hit.delta, "zone0", probes)


@dataclass(frozen=True)
class ScheduleStep:
    deck: int
    dials: DialPair

    def __str__(self):
        return f"od{self.deck}{self.dials}"


def default_schedule(max_v: int = 62) -> list[ScheduleStep]:
    """od4 over v = 2, 6, 10, ... then od5 over v = 4, 12, 20, ..., both base offsets."""
    steps = []
    for v in range(2, max_v + 1, 4):
        for base in (BASE_DIALS_4K, BASE_DIALS_4K2):
            steps.append(ScheduleStep(4, base.with_v(v)))
            if v == 2:
                steps.append(ScheduleStep(2, base.with_v(v)))
    for v in range(4, max_v + 1, 8):
        for base in ((-1, -2), (-2, -1)):
            steps.append(ScheduleStep(5, DialPair(base[0], base[1], v, v)))
    return steps


@dataclass
class ScanOutcome:
    result: FactorResult | None
    steps: int
    step: ScheduleStep | None = None


def factor_scan(n: int, schedule: Sequence[ScheduleStep] | None = None, budget: int = 64,
                registry: SteadyStateRegistry = DEFAULT_REGISTRY) -> ScanOutcome:
    """Walk the schedule in order, inverting each deck value against its registered forms."""
    if budget < 1:
        raise ConfigurationError("budget must be at least 1")
    schedule = default_schedule() if schedule is None else list(schedule)
    used = 0
    for step in schedule[:budget]:
        used += 1
        value = deck_values(n, step.dials)[step.deck]
        for delta in invert_ssv(step.deck, value, step.dials, registry):
            hit = quadratic_factor(n, delta, "zone0")
            if hit is not None:
                return ScanOutcome(FactorResult(hit.p, hit.q, hit.delta, "zone0", used), used, step)
    return ScanOutcome(None, used)


# ------------------------------------------------------------ od connect

@dataclass
class ConnectStep:
    n: int
    n_next: int
    relation: str
    d1: int
    d1_next: int
    od: dict
    od_next: dict
    df4_next: int


def od_connect_step(n: int, dials: DialPair, relation: str = "od3_quarter") -> ConnectStep:
    """Predict the next same-Δ composite assuming d1 advances by 2.

    relation "od3_quarter": od4' = (od3/4 - df4') * 2 together with od4' = od4 - df4'.
    relation "steady": df4' = 0, which holds inside an od4 zone.
    Either way od3 steps by 8 and n' = d1'^2 - od1'.
    """
    od = deck_values(n, dials)
    d1, _ = resolve_dials(n, dials)
    od3_next = od[3] + 8
    if relation == "od3_quarter":
        if od[3] % 2:
            raise SteppingError(f"od3={od[3]} is odd; the quarter relation has no integer solution")
        df4_next = od[3] // 2 - od[4]
    elif relation == "steady":
        df4_next = 0
    else:
        raise ConfigurationError(f"unknown relation {relation!r}")
    od4_next = od[4] - df4_next
    if (od4_next - od3_next) % 2:
        raise SteppingError("od1' and od2' are not integral")
    od1_next = (od4_next - od3_next) // 2
    od2_next = (od4_next + od3_next) // 2
    d1_next = d1 + 2
    n_next = d1_next * d1_next - od1_next
    if n_next <= n:
        raise SteppingError(f"predicted n'={n_next} does not move past n={n}")
    check_d1, _ = resolve_dials(n_next, dials)
    if check_d1 != d1_next:
        raise SteppingError(f"d1 does not advance by 2 at n'={n_next}: a switchover point was crossed")
    return ConnectStep(n, n_next, relation, d1, d1_next,
                       {k: od[k] for k in (1, 2, 3, 4)},
                       {1: od1_next, 2: od2_next, 3: od3_next, 4: od4_next}, df4_next)


def small_factor_pairs(m: int, bound: int = TRIAL_DIVISION_BOUND) -> list[tuple[int, int]]:
    """Factor pairs (a, b), 1 < a <= b, found by trial division up to `bound`."""
    pairs = []
    top = min(math.isqrt(m), bound)
    for a in range(2, top + 1):
        if m % a == 0:
            pairs.append((a, m // a))
    return pairs


def factor_via_neighbor(n: int, neighbor: int, bound: int = TRIAL_DIVISION_BOUND,
                        method: str = "od_connect") -> FactorResult | None:
    """Factor n from a same-Δ neighbor: every factor pair of the neighbor proposes a Δ."""
    for a, b in small_factor_pairs(neighbor, bound):
        hit = quadratic_factor(n, b - a, method)
        if hit is not None:
            return hit
    return None


def od_connect_factor(n: int, dials: DialPair, relations=("od3_quarter", "steady"),
                      bound: int = TRIAL_DIVISION_BOUND) -> FactorResult | None:
    for relation in relations:
        try:
            step = od_connect_step(n, dials, relation)
        except SteppingError:
            continue
        hit = factor_via_neighbor(n, step.n_next, bound)
        if hit is not None:
            return hit
    return None


# ------------------------------------------------------- neighbor ranges

@dataclass(frozen=True)
class NeighborRange:
    which: str
    lo: int
    hi: int


def neighbor_ranges(n: int, dials: DialPair) -> list[NeighborRange]:
    """Where the previous (n1) and next (n2) same-Δ composites fall if d1 stays linear."""
    d, _ = resolve_dials(n, dials)
    od1 = d * d - n
    low = lambda k: max(d - k, 0) ** 2 - od1
    return [NeighborRange("n1", low(4), low(2)),
            NeighborRange("n2", (d + 2) ** 2 - od1, (d + 4) ** 2 - od1)]


# ------------------------------------------------------------ reflection

@dataclass(frozen=True)
class ReflectionMark:
    x: int
    y: int
    gap: int
    center_ids: tuple
    span: int
    pairs: tuple = field(default=())

    @property
    def label(self) -> str:
        return f"ro{{{self.x},{self.y}}}{self.gap}"


def reflection_scan(rows: Sequence[SeriesRow], min_span: int = 2) -> list[ReflectionMark]:
    """Adjacent pivots (x, y) about which od6 mirrors with a constant offset y - x.

    Values must move strictly away from the pivot on both sides, the same way.
    """
    values = [r.od.get(6) for r in rows]
    marks = []
    for i in range(1, len(rows) - 2):
        x, y = values[i], values[i + 1]
        if x is None or y is None:
            continue
        offset = y - x
        pairs = []
        inner_l, inner_r = x, y
        k = 1
        while i - k >= 0 and i + 1 + k < len(rows):
            left, right = values[i - k], values[i + 1 + k]
            if left is None or right is None or right - left != offset:
                break
            direction = left - inner_l
            if direction == 0 or (right - inner_r) * direction <= 0:
                break
            if pairs and (direction > 0) != (pairs[0][2] > 0):
                break
            pairs.append((left, right, direction))
            inner_l, inner_r = left, right
            k += 1
        if len(pairs) >= min_span:
            marks.append(ReflectionMark(x, y, abs(offset), (rows[i].id, rows[i + 1].id), len(pairs),
                                        tuple((a, b) for a, b, _ in pairs)))
    return marks


# ------------------------------------------------------------ od6 search

def _od6_probe(m: int, dials: DialPair) -> int | None:
    if dials.v1 == dials.v2 == 2:
        d1, _ = resolve_dials(m, dials)
        return abs(d1 * d1 + 2 * d1 - m)
    return deck_values(m, dials)[6]


@dataclass(frozen=True)
class Od6Candidate:
    m: int
    deltas: tuple


def od6_search(n: int, dials: DialPair, direction: str = "down", budget: int = 1000,
               target: int | None = None, bound: int = TRIAL_DIVISION_BOUND) -> list[Od6Candidate]:
    """Walk m = n +/- 2k looking for od6(m) == target (od6 of n by default).

    "down" follows the table downward, toward larger n. For v = 2 the test is
    od6^2 = (d1^2 + 2*d1 - m)^2. Each hit carries the Δ of its small factor pairs.
    """
    if direction not in ("up", "down", "both"):
        raise ConfigurationError("direction must be up, down or both")
    if budget < 1:
        return []
    if target is None:
        target = _od6_probe(n, dials)
        if target is None:
            raise ConfigurationError(f"od6 of {n} is undefined; give a target")
    signs = {"down": (2,), "up": (-2,), "both": (2, -2)}[direction]
    out = []
    step = 0
    k = 1
    while step < budget:
        for s in signs:
            if step >= budget:
                break
            m = n + s * k
            if m < 1:
                continue
            step += 1
            if _od6_probe(m, dials) == target:
                deltas = tuple(sorted({b - a for a, b in small_factor_pairs(m, bound)}))
                out.append(Od6Candidate(m, deltas))
        k += 1
        if direction == "up" and n - 2 * k < 1:
            break
    return out


def od6_factor(n: int, dials: DialPair, direction: str = "both", budget: int = 1000,
               target: int | None = None, bound: int = TRIAL_DIVISION_BOUND) -> FactorResult | None:
    """Try each od6 search hit as a same-Δ neighbor of n."""
    for cand in od6_search(n, dials, direction, budget, target, bound):
        for delta in cand.deltas:
            hit = quadratic_factor(n, delta, "reflection")
            if hit is not None:
                return hit
    return None


# ------------------------------------------------------------ inter Δ

@dataclass
class InterDeltaRecord:
    known_delta: int
    id: int
    dials: DialPair
    known_zones: list
    n_unknown: int
    unknown_delta: int | None
    unknown_id: int | None
    unknown_zones: list

    @property
    def verified(self) -> bool:
        return bool(self.known_zones) and bool(self.unknown_zones)


def _zones_at(spec: SeriesSpec, row_id: int, decks, window: int = 64) -> list[tuple[int, int]]:
    start = max(1, row_id - window)
    rows = generate(spec, row_id + window - start + 1, first_id=start)
    found = []
    for deck in decks:
        zones, _ = detect_zones(rows, criterion_for(deck), open_ended=False)
        for z in zones:
            if z.id_start <= row_id <= z.id_end:
                found.append((deck, z.steady_value))
    return found


def inter_delta_verify(known_delta: int, row_id: int, dials: DialPair, n_unknown: int,
                       decks=(1, 2, 3, 4, 5), p_parity: str = "odd",
                       bound: int = TRIAL_DIVISION_BOUND) -> InterDeltaRecord:
    """Check that the known Δ has a zone at row_id and that n_unknown sits in a zone too.

    The unknown side is located by trial-division factoring, so this only
    verifies a proposed link; it does not discover one.
    """
    deck_list = [parse_deck(d) for d in decks]
    spec = SeriesSpec("delta", known_delta, p_parity, (dials,))
    known = _zones_at(spec, row_id, deck_list)
    unknown_delta = unknown_id = None
    unknown = []
    pairs = small_factor_pairs(n_unknown, bound)
    for a, b in pairs:
        u_spec = SeriesSpec("delta", b - a, parity_of(a), (dials,))
        u_id = u_spec.id_of(a)
        hits = _zones_at(u_spec, u_id, deck_list)
        if hits:
            unknown_delta, unknown_id, unknown = b - a, u_id, hits
            break
    return InterDeltaRecord(known_delta, row_id, dials, known, n_unknown,
                            unknown_delta, unknown_id, unknown)

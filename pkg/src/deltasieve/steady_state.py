"""Steady-state values: a registry of closed forms c1*Δ² + c2*Δ + k per deck and dial family.

The registry answers three questions: what value a deck settles on for a
given Δ, which Δ could have produced an observed deck value, and where the
first steady row sits for the two base dial families.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ConfigurationError, NoClosedFormError, UnsupportedDeltaError
from .series import (
    BASE_DIALS_4K,
    BASE_DIALS_4K2,
    DialPair,
    SeriesSpec,
    iter_rows,
    parse_deck,
    parse_parity,
)

TERMINAL = "terminal"
BOUNDED = "bounded"

SECOND_PAIR_BASE = (DialPair(0, -1, 6, 6), DialPair(-2, 1, 16, 16))
WIDE_DIALS = DialPair(-2, 2, 12, 12)


def family_key(dials) -> str:
    if isinstance(dials, DialPair):
        dials = (dials,)
    return "+".join(str(d) for d in dials)


def _as_family(dials) -> tuple:
    if dials is None:
        return None
    if isinstance(dials, str):
        return tuple(DialPair.parse(part) for part in dials.split("+"))
    if isinstance(dials, DialPair):
        return (dials,)
    return tuple(dials)


@dataclass(frozen=True)
class SteadyStateForm:
    deck: int
    dials: tuple
    delta_mod4: int
    p_parity: str
    c1: Fraction
    c2: Fraction
    k: int
    zone: str = TERMINAL
    label: str = ""
    source: str = "closed-form"

    def __post_init__(self):
        for name in ("c1", "c2"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        object.__setattr__(self, "dials", _as_family(self.dials))
        if self.c1 == 0 and self.c2 == 0:
            raise ConfigurationError("a steady-state form needs a Δ term")

    @property
    def dial_family(self) -> str:
        return family_key(self.dials)

    @property
    def v(self) -> int | None:
        return self.dials[0].uniform_v

    @property
    def name(self) -> str:
        return self.label or f"od{self.deck}"

    @property
    def form_id(self) -> str:
        return f"{self.name}={_poly_text(self.c1, self.c2, self.k)}"

    def value(self, delta: int) -> int:
        raw = self.c1 * delta * delta + self.c2 * delta + self.k
        if raw.denominator != 1:
            raise ConfigurationError(f"{self.form_id} is not integral at Δ={delta}")
        return int(raw)

    def matches_class(self, delta: int, parity: str) -> bool:
        return delta % 4 == self.delta_mod4 and parity == self.p_parity

    def solve(self, observed: int) -> list[int]:
        """Positive integral Δ of this form's residue class with value == observed."""
        scale = math.lcm(self.c1.denominator, self.c2.denominator)
        a = int(self.c1 * scale)
        b = int(self.c2 * scale)
        c = (self.k - observed) * scale
        roots = set()
        if a == 0:
            if b != 0 and (-c) % b == 0:
                roots.add(-c // b)
        else:
            disc = b * b - 4 * a * c
            if disc >= 0:
                s = math.isqrt(disc)
                if s * s == disc:
                    for num in (-b + s, -b - s):
                        if num % (2 * a) == 0:
                            roots.add(num // (2 * a))
        return sorted(d for d in roots if d > 0 and d % 4 == self.delta_mod4)


def _poly_text(c1: Fraction, c2: Fraction, k: int) -> str:
    parts = []
    if c1:
        parts.append("D^2" if c1 == 1 else f"{c1}*D^2")
    if c2:
        parts.append("D" if c2 == 1 else f"{c2}*D")
    if k or not parts:
        parts.append(str(k))
    return "+".join(parts).replace("+-", "-")


class SteadyStateRegistry:
    """Immutable collection of forms with lookup and inversion helpers."""

    def __init__(self, forms: Iterable[SteadyStateForm]):
        self._forms = tuple(forms)

    def __iter__(self):
        return iter(self._forms)

    def __len__(self):
        return len(self._forms)

    def extended(self, forms: Iterable[SteadyStateForm]) -> "SteadyStateRegistry":
        return SteadyStateRegistry(self._forms + tuple(forms))

    def select(self, deck=None, dials=None, delta: int | None = None,
               p_parity: str | None = None, v: int | None = None,
               label: str | None = None) -> list[SteadyStateForm]:
        family = _as_family(dials)
        parity = parse_parity(p_parity) if p_parity is not None else None
        deck_no = parse_deck(deck) if deck is not None else None
        out = []
        for form in self._forms:
            if deck_no is not None and form.deck != deck_no:
                continue
            if family is not None and form.dials != family:
                continue
            if delta is not None and delta % 4 != form.delta_mod4:
                continue
            if parity is not None and form.p_parity != parity:
                continue
            if v is not None and form.v != v:
                continue
            if label is not None and form.name != label:
                continue
            out.append(form)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["deck", "dial_family", "delta_mod4", "p_parity",
                    "c1_num", "c1_den", "c2_num", "c2_den", "k"])
        for f in self._forms:
            w.writerow([f.name, f.dial_family, f.delta_mod4, f.p_parity,
                        f.c1.numerator, f.c1.denominator,
                        f.c2.numerator, f.c2.denominator, f.k])
        return buf.getvalue()


# Δ mod 4 / parity classes in which each base dial family settles od4 (the
# other two classes settle od2 instead).
_OD4_CLASSES = {
    (0, -1): ((0, "odd"), (2, "even")),
    (-1, 0): ((2, "odd"), (0, "even")),
}
_OD2_CLASSES = {
    (0, -1): ((2, "odd"), (0, "even")),
    (-1, 0): ((0, "odd"), (2, "even")),
}
# od5 = Δ² + 3v²/4 families keyed by the a-offsets.
_OD5_CLASSES = {
    (-1, -2): ((2, "odd"), (0, "even")),
    (-2, -1): ((0, "odd"), (2, "even")),
}
# Odd Δ: od5 = Δ² + 3 under the base dials.
_ODD_OD5_CLASSES = {
    (-1, 0): ((3, "odd"), (1, "even")),
    (0, -1): ((1, "odd"), (3, "even")),
}

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


def _build_default_forms(max_v: int = 62) -> list[SteadyStateForm]:
    forms = []
    for (a1, a2), classes in _OD4_CLASSES.items():
        for v in range(2, max_v + 1, 4):  # v = 2k with k odd
            dials = DialPair(a1, a2, v, v)
            for mod4, parity in classes:
                forms.append(SteadyStateForm(4, dials, mod4, parity, HALF, 0, v * v // 2,
                                             TERMINAL if v == 2 else BOUNDED))
    for (a1, a2), classes in _OD2_CLASSES.items():
        for mod4, parity in classes:
            forms.append(SteadyStateForm(2, DialPair(a1, a2, 2, 2), mod4, parity, QUARTER, 0, 0))
    for (a1, a2), classes in _OD5_CLASSES.items():
        for v in range(4, max_v + 1, 8):  # v = 4k with k odd
            dials = DialPair(a1, a2, v, v)
            for mod4, parity in classes:
                forms.append(SteadyStateForm(5, dials, mod4, parity, 1, 0, 3 * v * v // 4,
                                             TERMINAL if v == 4 else BOUNDED))
    for (a1, a2), classes in _ODD_OD5_CLASSES.items():
        for mod4, parity in classes:
            forms.append(SteadyStateForm(5, DialPair(a1, a2, 2, 2), mod4, parity, 1, 0, 3))

    # Two dial pairs: zones of od7..od11, seen for Δ ≡ 2 with odd p and Δ ≡ 0 with even p.
    for mod4, parity in ((2, "odd"), (0, "even")):
        pairs = SECOND_PAIR_BASE
        forms += [
            SteadyStateForm(7, pairs, mod4, parity, QUARTER, 0, 0, TERMINAL),
            SteadyStateForm(8, pairs, mod4, parity, QUARTER, 0, 0, BOUNDED),
            SteadyStateForm(9, pairs, mod4, parity, HALF, 0, 72, BOUNDED, label="od9a"),
            SteadyStateForm(9, pairs, mod4, parity, HALF, 0, 32, BOUNDED, label="od9b"),
            SteadyStateForm(10, pairs, mod4, parity, Fraction(3, 4), 0, 168, BOUNDED),
            SteadyStateForm(11, pairs, mod4, parity, Fraction(5, 4), 0, 144, BOUNDED),
        ]

    # {-2,2,12,12}: zones found by scanning, registered as empirical forms.
    for mod4 in (0, 2):
        for parity in ("odd", "even"):
            forms += [
                SteadyStateForm(2, WIDE_DIALS, mod4, parity, QUARTER, 0, 0, BOUNDED, source="empirical"),
                SteadyStateForm(4, WIDE_DIALS, mod4, parity, HALF, 0, 72, BOUNDED, source="empirical"),
                SteadyStateForm(5, WIDE_DIALS, mod4, parity, 1, 0, 108, BOUNDED, source="empirical"),
            ]
    for mod4, parity in ((0, "odd"), (2, "even")):
        forms.append(SteadyStateForm(1, WIDE_DIALS, mod4, parity, QUARTER, 0, 0, BOUNDED,
                                     source="empirical"))
    return forms


DEFAULT_REGISTRY = SteadyStateRegistry(_build_default_forms())


@dataclass(frozen=True)
class SsvQuery:
    deck: int
    delta: int
    dials: tuple | None = None
    p_parity: str | None = None
    v: int | None = None
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "deck", parse_deck(self.deck))
        object.__setattr__(self, "dials", _as_family(self.dials))
        if self.p_parity is not None:
            object.__setattr__(self, "p_parity", parse_parity(self.p_parity))
        if self.delta < 1:
            raise ConfigurationError("Δ must be at least 1")


def matching_forms(q: SsvQuery, registry: SteadyStateRegistry = DEFAULT_REGISTRY):
    return registry.select(q.deck, q.dials, q.delta, q.p_parity, q.v, q.label)


def ssv_closed_form(q: SsvQuery, registry: SteadyStateRegistry = DEFAULT_REGISTRY) -> int:
    """Steady value of q.deck for q.delta.

    Unspecified attributes of the query (dials, parity, v) are left open; the
    answer must still be unique among the matching forms.
    """
    forms = matching_forms(q, registry)
    if not forms:
        raise NoClosedFormError(
            f"no closed form for od{q.deck}, Δ={q.delta}, dials={q.dials and family_key(q.dials)}, "
            f"parity={q.p_parity}")
    values = {f.value(q.delta) for f in forms}
    if len(values) > 1:
        labels = sorted({f.name for f in forms})
        raise ConfigurationError(
            f"ambiguous query, candidates {sorted(values)}; narrow with label among {labels}")
    return values.pop()


def invert_ssv(deck, observed: int, family=None, registry: SteadyStateRegistry = DEFAULT_REGISTRY,
               v: int | None = None) -> list[int]:
    """Candidate Δ whose registered steady value for `deck` equals `observed`.

    `family` narrows the search to one dial configuration (a DialPair, a pair
    of them, or the "+"-joined text form).
    """
    return sorted({d for d, _ in invert_ssv_forms(deck, observed, family, registry, v)})


def invert_ssv_forms(deck, observed: int, family=None,
                     registry: SteadyStateRegistry = DEFAULT_REGISTRY, v: int | None = None):
    out = []
    for form in registry.select(deck, family, v=v):
        for delta in form.solve(observed):
            out.append((delta, form))
    return out


# ---------------------------------------------------------------- first p

def _base_family(dials: DialPair) -> tuple[int, int]:
    if dials == BASE_DIALS_4K:
        return (0, -1)
    if dials == BASE_DIALS_4K2:
        return (-1, 0)
    raise UnsupportedDeltaError(f"first-p formulas exist only for {BASE_DIALS_4K} and {BASE_DIALS_4K2}")


def first_p_at_ssv(delta: int, dials: DialPair, p_parity) -> int:
    """p of the first zone₀ row (od2 or od4) for the two base dial families."""
    parity = parse_parity(p_parity)
    if delta % 2:
        raise UnsupportedDeltaError("no first-p formula for odd Δ")
    if delta < 4:
        raise UnsupportedDeltaError("first-p formulas start at Δ = 4")
    family = _base_family(dials)
    # the smallest Δ can give p below the series start; the zone then starts at the first row
    first = 1 if parity == "odd" else 2
    return max(first, _first_p_formula(delta, family, parity))


def _first_p_formula(delta: int, family, parity: str) -> int:
    m = (delta - 4) // 4
    t = (delta - 6) // 4
    four_k = delta % 4 == 0
    k_even = (delta // 4) % 2 == 0
    if family == (0, -1):
        if parity == "odd":
            return 2 * m * (m + 1) + 1 if four_k else (t + 1) ** 2 - t
        if four_k:
            return m * m if not k_even else m * (m + 1) - (m - 1)
        return 2 * ((t + 1) ** 2 - 1) + 2
    if parity == "odd":
        if four_k:
            return m * m if k_even else m * (m + 1) - (m - 1)
        return 2 * ((t + 1) ** 2 - 1) + 3
    return 2 * m * (m + 1) + 2 if four_k else t * (t + 1) + 2


def zone0_deck(delta: int, dials: DialPair, p_parity) -> int:
    """Which deck (2 or 4) carries zone₀ for a base dial family."""
    parity = parse_parity(p_parity)
    family = _base_family(dials)
    for mod4, par in _OD4_CLASSES[family]:
        if delta % 4 == mod4 and parity == par:
            return 4
    return 2


# ---------------------------------------------------------- verification

@dataclass
class VerificationEntry:
    delta: int
    expected: int
    zone: str
    switchover_id: int | None
    switchover_p: int | None
    rows_checked: int
    passed: bool
    note: str = ""


@dataclass
class VerificationReport:
    deck: int
    entries: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.entries) and all(e.passed for e in self.entries)


def scan_for_constant(spec: SeriesSpec, deck: int, value: int, run: int,
                      max_rows: int) -> tuple[int | None, int]:
    """First id from which `deck` equals `value` for `run` rows; also rows visited."""
    start = None
    seen = 0
    for row in iter_rows(spec):
        seen += 1
        if row.od[deck] == value:
            if start is None:
                start = row.id
            if row.id - start + 1 >= run:
                return start, seen
        else:
            start = None
        if seen >= max_rows:
            break
    return None, seen


def scan_for_zone(spec: SeriesSpec, deck: int, value: int,
                  max_rows: int) -> tuple[int | None, int | None]:
    """First maximal run (length >= 2) of `value` in `deck`, as (start id, end id)."""
    start = end = None
    for row in iter_rows(spec):
        if row.od[deck] == value:
            if start is None:
                start = row.id
            end = row.id
        elif start is not None:
            if end > start:
                return start, end
            start = end = None
        if row.id >= max_rows:
            break
    if start is not None and end > start:
        return start, end
    return None, None


def _verify_one(form: SteadyStateForm, delta: int, parity: str, horizon: int,
                max_rows: int | None) -> VerificationEntry:
    expected = form.value(delta)
    spec = SeriesSpec("delta", delta, parity, form.dials, decks={form.deck})
    limit = max_rows or (delta * delta // 8 + horizon + 64)
    if form.zone == TERMINAL:
        start, _ = scan_for_constant(spec, form.deck, expected, horizon, limit)
        if start is None:
            return VerificationEntry(delta, expected, form.zone, None, None, 0, False,
                                     "no steady run of the requested length")
        return VerificationEntry(delta, expected, form.zone, start, spec.p_at(start),
                                 horizon, True)
    start, end = scan_for_zone(spec, form.deck, expected, limit)
    if start is None:
        return VerificationEntry(delta, expected, form.zone, None, None, 0, False,
                                 "bounded zone not found")
    return VerificationEntry(delta, expected, form.zone, start, spec.p_at(start),
                             end - start + 1, True)


def verify_ssv_empirically(q: SsvQuery, horizon: int = 200, *, also_plus4: bool = True,
                           max_rows: int | None = None,
                           registry: SteadyStateRegistry = DEFAULT_REGISTRY) -> VerificationReport:
    """Generate the series for Δ (and Δ+4) and confirm the registered steady value.

    Terminal forms must hold for `horizon` consecutive rows from their first
    steady row; bounded forms must show a zone carrying the value.
    """
    if horizon < 1:
        raise ConfigurationError("horizon must be positive")
    if q.dials is None or q.p_parity is None:
        raise ConfigurationError("empirical verification needs dials and p parity")
    report = VerificationReport(q.deck)
    deltas: Sequence[int] = (q.delta, q.delta + 4) if also_plus4 else (q.delta,)
    for delta in deltas:
        forms = registry.select(q.deck, q.dials, delta, q.p_parity, q.v, q.label)
        if not forms:
            raise NoClosedFormError(f"no closed form for od{q.deck} at Δ={delta}")
        for form in forms:
            report.entries.append(_verify_one(form, delta, q.p_parity, horizon, max_rows))
    return report

"""Δ-series and Σ-series rows: dials, observation decks and their differences.

Every value is an exact Python integer. A row depends only on ``p``; the df
columns are the only thing that needs the previous row.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import ConfigurationError, DomainError

ALL_DECKS = tuple(range(1, 12))
SINGLE_PAIR_DECKS = frozenset(range(1, 7))
SECOND_PAIR_DECKS = frozenset(range(7, 12))

UNDEFINED = "undefined"


def integer_sqrt_floor(n: int) -> int:
    """Largest r with r*r <= n."""
    if n < 0:
        raise DomainError(f"square root of negative integer {n}")
    return math.isqrt(n)


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def parse_deck(token) -> int:
    """Accept 4, "4", "od4" or "OD4" and return the deck number."""
    if isinstance(token, int):
        deck = token
    else:
        text = str(token).strip().lower()
        if text.startswith("od"):
            text = text[2:]
        try:
            deck = int(text)
        except ValueError:
            raise ConfigurationError(f"unknown deck {token!r}") from None
    if deck not in ALL_DECKS:
        raise ConfigurationError(f"unknown deck {token!r}")
    return deck


def parse_parity(value) -> str:
    text = str(value).strip().lower()
    if text in ("odd", "1"):
        return "odd"
    if text in ("even", "0", "2"):
        return "even"
    raise ConfigurationError(f"parity must be odd or even, got {value!r}")


def parity_of(p: int) -> str:
    return "odd" if p % 2 else "even"


@dataclass(frozen=True)
class DialPair:
    """Offsets {a1, a2, v1, v2}.

    a1 is added to isqrt(n) when that root is even, a2 when it is odd; v1 is
    added to d1 when d1 is even, v2 when it is odd.
    """

    a1: int
    a2: int
    v1: int
    v2: int

    def __post_init__(self):
        for name in ("a1", "a2", "v1", "v2"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigurationError(f"dial offset {name} must be an integer")

    @classmethod
    def parse(cls, text: str) -> "DialPair":
        body = str(text).strip().strip("{}[]() ")
        parts = [t for t in body.replace(";", ",").split(",") if t.strip()]
        if len(parts) != 4:
            raise ConfigurationError(f"dials need exactly four integers, got {text!r}")
        try:
            return cls(*(int(t) for t in parts))
        except ValueError:
            raise ConfigurationError(f"dials need exactly four integers, got {text!r}") from None

    def with_v(self, v: int) -> "DialPair":
        return DialPair(self.a1, self.a2, v, v)

    @property
    def uniform_v(self) -> int | None:
        return self.v1 if self.v1 == self.v2 else None

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a1, self.a2, self.v1, self.v2)

    def __str__(self) -> str:
        return "{%d,%d,%d,%d}" % self.as_tuple()


BASE_DIALS_4K = DialPair(0, -1, 2, 2)
BASE_DIALS_4K2 = DialPair(-1, 0, 2, 2)


def _dial_walk(n: int, dials: DialPair) -> tuple[int, int, int, int]:
    r = integer_sqrt_floor(n)
    d1 = r + (dials.a1 if r % 2 == 0 else dials.a2)
    v = dials.v1 if d1 % 2 == 0 else dials.v2
    return r, d1, d1 + v, v


def resolve_dials(n: int, dials: DialPair) -> tuple[int, int]:
    """Return (d1, d2) for n under the given dial pair."""
    _, d1, d2, _ = _dial_walk(n, dials)
    return d1, d2


def deck_values(n: int, dials: DialPair, second: DialPair | None = None) -> dict:
    """All observation-deck values of n. od6 is None when its radicand is not a square."""
    _, d1, d2, v = _dial_walk(n, dials)
    od1 = d1 * d1 - n
    od2 = d2 * d2 - n
    od = {1: od1, 2: od2, 3: od2 - od1, 4: od2 + od1}
    od[5] = od1 + od2 + od[3] + od[4]
    od[6] = od6_from(n, v, od1, od2)
    if second is not None:
        _, d3, d4, _ = _dial_walk(n, second)
        od[7] = d3 * d3 - n
        od[8] = d4 * d4 - n
        od[9] = od2 + od[8]
        od[10] = od[4] + od[8]
        od[11] = od2 + 2 * od[8] + od[4]
    return od


def od6_from(n: int, v: int, od1: int, od2: int) -> int | None:
    radicand = n * v * v + od1 * od2
    if radicand < 0:
        return None
    root = math.isqrt(radicand)
    return root if root * root == radicand else None


@dataclass(frozen=True)
class SeriesSpec:
    """What to generate: a Δ-series (q = p + Δ) or Σ-series (q = Σ - p)."""

    kind: str
    value: int
    p_parity: str = "odd"
    dials: tuple = (BASE_DIALS_4K,)
    p_start: int | None = None
    decks: frozenset | None = None

    def __post_init__(self):
        if self.kind not in ("delta", "sum"):
            raise ConfigurationError(f"series kind must be delta or sum, got {self.kind!r}")
        if self.value < 1:
            raise ConfigurationError("series value must be positive")
        object.__setattr__(self, "p_parity", parse_parity(self.p_parity))
        dials = self.dials
        if isinstance(dials, DialPair):
            dials = (dials,)
        dials = tuple(DialPair.parse(d) if isinstance(d, str) else d for d in dials)
        if not 1 <= len(dials) <= 2:
            raise ConfigurationError("a series takes one or two dial pairs")
        object.__setattr__(self, "dials", dials)
        start = self.p_start
        if start is None:
            start = 1 if self.p_parity == "odd" else 2
        if start < 1 or parity_of(start) != self.p_parity:
            raise ConfigurationError(f"p_start {start} does not have {self.p_parity} parity")
        object.__setattr__(self, "p_start", start)
        available = SINGLE_PAIR_DECKS | (SECOND_PAIR_DECKS if len(dials) == 2 else frozenset())
        decks = available if self.decks is None else frozenset(parse_deck(d) for d in self.decks)
        missing = decks - available
        if missing:
            raise ConfigurationError(
                f"decks {sorted(missing)} need a second dial pair")
        object.__setattr__(self, "decks", decks)

    def p_at(self, row_id: int) -> int:
        return self.p_start + 2 * (row_id - 1)

    def id_of(self, p: int) -> int:
        return (p - self.p_start) // 2 + 1

    def q_of(self, p: int) -> int:
        return p + self.value if self.kind == "delta" else self.value - p


@dataclass
class SeriesRow:
    id: int
    p: int
    q: int
    n: int
    isqrt_n: int
    d1: int
    d2: int
    d3: int | None = None
    d4: int | None = None
    od: dict = field(default_factory=dict)
    df: dict = field(default_factory=dict)

    def deck(self, deck) -> int | None:
        return self.od.get(parse_deck(deck))


def compute_row(spec: SeriesSpec, p: int, prev_row: SeriesRow | None = None,
                row_id: int | None = None) -> SeriesRow:
    if parity_of(p) != spec.p_parity:
        raise ConfigurationError(f"p={p} does not have {spec.p_parity} parity")
    if spec.kind == "sum" and p > spec.value:
        raise ConfigurationError(f"p={p} exceeds Σ={spec.value}")
    q = spec.q_of(p)
    n = p * q
    r, d1, d2, _ = _dial_walk(n, spec.dials[0])
    second = spec.dials[1] if len(spec.dials) == 2 else None
    values = deck_values(n, spec.dials[0], second)
    od = {k: values[k] for k in sorted(spec.decks)}
    d3 = d4 = None
    if second is not None:
        d3, d4 = resolve_dials(n, second)
    if prev_row is None:
        df = {k: 0 for k in od}
    else:
        df = {}
        for k, value in od.items():
            before = prev_row.od.get(k)
            df[k] = None if value is None or before is None else before - value
    if row_id is None:
        row_id = prev_row.id + 1 if prev_row is not None else spec.id_of(p)
    return SeriesRow(row_id, p, q, n, r, d1, d2, d3, d4, od, df)


def iter_rows(spec: SeriesSpec, first_id: int = 1) -> Iterator[SeriesRow]:
    """Endless row stream starting at first_id (a sum series stops at p = Σ)."""
    if first_id < 1:
        raise ConfigurationError("row ids start at 1")
    prev = None
    if first_id > 1:
        p_prev = spec.p_at(first_id - 1)
        if spec.kind == "delta" or p_prev <= spec.value:
            prev = compute_row(spec, p_prev, row_id=first_id - 1)
    row_id = first_id
    while True:
        p = spec.p_at(row_id)
        if spec.kind == "sum" and p > spec.value:
            return
        row = compute_row(spec, p, prev, row_id=row_id)
        yield row
        prev = row
        row_id += 1


def generate(spec: SeriesSpec, rows: int | None = None, *, first_id: int = 1,
             stop_deck=None, stop_k: int = 3) -> list[SeriesRow]:
    """Rows in ascending id.

    Stops after `rows` rows, or earlier once `stop_k` consecutive rows share
    the same value in `stop_deck`. At least one of the two limits is needed.
    """
    if rows is None and stop_deck is None:
        raise ConfigurationError("give a row count, a steady-stop deck, or both")
    if rows is not None and rows < 1:
        raise ConfigurationError("row count must be positive")
    if stop_k < 1:
        raise ConfigurationError("steady-stop run length must be positive")
    deck = parse_deck(stop_deck) if stop_deck is not None else None
    out: list[SeriesRow] = []
    run = 0
    for row in iter_rows(spec, first_id):
        out.append(row)
        if deck is not None:
            if len(out) > 1 and row.od[deck] == out[-2].od[deck]:
                run += 1
            else:
                run = 1
            if run >= stop_k:
                break
        if rows is not None and len(out) >= rows:
            break
    return out


CSV_HEADER = (["id", "p", "q", "n", "isqrt_n", "d1", "d2"]
              + [f"od{k}" for k in ALL_DECKS] + [f"df{k}" for k in ALL_DECKS])


def _cell(row: SeriesRow, table: dict, deck: int) -> str:
    if deck not in row.od:
        return ""
    value = table.get(deck)
    return UNDEFINED if value is None else str(value)


def row_to_record(row: SeriesRow) -> list[str]:
    head = [row.id, row.p, row.q, row.n, row.isqrt_n, row.d1, row.d2]
    return ([str(x) for x in head]
            + [_cell(row, row.od, k) for k in ALL_DECKS]
            + [_cell(row, row.df, k) for k in ALL_DECKS])


def rows_to_csv(rows: Iterable[SeriesRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row_to_record(row))
    return buf.getvalue()


def reconstruct_from_df(first: dict, dfs: Sequence[dict]) -> list[dict]:
    """Rebuild od maps from the first row and the df maps of the rows after it."""
    out = [dict(first)]
    for df in dfs:
        prev = out[-1]
        out.append({k: prev[k] - df[k] for k in prev})
    return out

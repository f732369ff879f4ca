"""Equilibrium between od6 on a Δ-series and N on the Σ-series with Σ = Δ.

The Σ side takes N = p * (Σ - p) starting at the middle of the series and
walking outward (past p = Σ, where N turns negative). The Δ side walks od6
from the first steady row back toward the head of the series.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConfigurationError, UnsupportedDeltaError
from .factorizer import FactorResult, quadratic_factor
from .series import (BASE_DIALS_4K, BASE_DIALS_4K2, DialPair, deck_values, parse_parity)
from .steady_state import first_p_at_ssv

SUM_DIALS = BASE_DIALS_4K2


def delta_side_dials(delta: int, p_parity) -> DialPair:
    """The base dial pair whose od6 settles first for this class."""
    parity = parse_parity(p_parity)
    four_k = delta % 4 == 0
    if parity == "odd":
        return BASE_DIALS_4K if four_k else BASE_DIALS_4K2
    return BASE_DIALS_4K2 if four_k else BASE_DIALS_4K


def _check_delta(delta: int):
    if delta % 2:
        raise UnsupportedDeltaError("equilibrium needs an even Δ")
    if delta < 4:
        raise UnsupportedDeltaError("equilibrium starts at Δ = 4")


@dataclass(frozen=True)
class EquilibriumAnchor:
    delta: int
    parity: str
    n_anchor: int
    od6_ssv: int
    first_steady_p: int


def _sum_start(delta: int, parity: str) -> int:
    half = delta // 2
    return half if (half % 2 == 1) == (parity == "odd") else half + 1


def equilibrium_anchor(delta: int, p_parity="odd", dials: DialPair | None = None) -> EquilibriumAnchor:
    """N where the two series meet: od6_ssv, or od6_ssv + 1 for the complementary classes."""
    _check_delta(delta)
    parity = parse_parity(p_parity)
    dials = dials or delta_side_dials(delta, parity)
    p1 = first_p_at_ssv(delta, dials, parity)
    od6_ssv = deck_values(p1 * (p1 + delta), dials)[6]
    exact = (delta % 4 == 0) == (parity == "odd")
    n_anchor = od6_ssv if exact else od6_ssv + 1
    s = _sum_start(delta, parity)
    if s * (delta - s) != n_anchor:
        raise AssertionError(f"anchor {n_anchor} is not the top of the Σ={delta} series")
    return EquilibriumAnchor(delta, parity, n_anchor, od6_ssv, p1)


@dataclass(frozen=True)
class EquilibriumRow:
    n_sum: int
    od6_delta: int
    constant: int
    df: int | None


def equilibrium_table(delta: int, length: int | None = None, p_parity="odd",
                      dials: DialPair | None = None) -> list[EquilibriumRow]:
    """Constants N - od6, one per Δ-series row from the first steady row back to id 1.

    A length beyond that many rows is truncated.
    """
    anchor = equilibrium_anchor(delta, p_parity, dials)
    dials = dials or delta_side_dials(delta, anchor.parity)
    start = 1 if anchor.parity == "odd" else 2
    rows_available = (anchor.first_steady_p - start) // 2 + 1
    count = rows_available if length is None else min(length, rows_available)
    s = _sum_start(delta, anchor.parity)
    out = []
    prev = None
    for k in range(count):
        p = anchor.first_steady_p - 2 * k
        od6 = deck_values(p * (p + delta), dials)[6]
        if od6 is None:
            raise AssertionError(f"od6 undefined at p={p}")
        ps = s + 2 * k
        n_sum = ps * (delta - ps)
        constant = n_sum - od6
        out.append(EquilibriumRow(n_sum, od6, constant, None if prev is None else prev - constant))
        prev = constant
    return out


def constants_of(delta: int, p_parity="odd") -> list[int]:
    return [r.constant for r in equilibrium_table(delta, p_parity=p_parity)]


EQUILIBRIUM_CSV_HEADER = ["n_sum", "od6_delta", "constant", "df"]


def equilibrium_csv(rows: Iterable[EquilibriumRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EQUILIBRIUM_CSV_HEADER)
    for r in rows:
        w.writerow([r.n_sum, r.od6_delta, r.constant, "" if r.df is None else r.df])
    return buf.getvalue()


@dataclass(frozen=True)
class GecStats:
    delta: int
    gec: int
    nce: int
    residue: int

    @property
    def total(self) -> int:
        return self.gec + self.nce


def count_gec(previous: Sequence[int], current: Sequence[int], mode: str = "position") -> int:
    """Constants of `current` shared with `previous`, row by row or as multisets."""
    if mode == "position":
        return sum(1 for a, b in zip(previous, current) if a == b)
    if mode == "multiset":
        from collections import Counter
        return sum((Counter(previous) & Counter(current)).values())
    raise ConfigurationError("mode must be position or multiset")


def gec_growth(delta_start: int, delta_end: int, p_parity="odd",
               mode: str = "position") -> list[GecStats]:
    """gec, nce and residue for each Δ against Δ - 4, from delta_start + 4 up to delta_end."""
    if (delta_end - delta_start) % 4:
        raise ConfigurationError("delta_start and delta_end must agree mod 4")
    out = []
    if delta_end <= delta_start:
        return out
    previous = constants_of(delta_start, p_parity)
    for delta in range(delta_start + 4, delta_end + 1, 4):
        current = constants_of(delta, p_parity)
        gec = count_gec(previous, current, mode)
        total = len(current)
        out.append(GecStats(delta, gec, total - gec, total - 2 * gec))
        previous = current
    return out


GEC_CSV_HEADER = ["delta", "gec", "nce", "residue"]


def gec_csv(stats: Iterable[GecStats]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GEC_CSV_HEADER)
    for s in stats:
        w.writerow([s.delta, s.gec, s.nce, s.residue])
    return buf.getvalue()


def _pairs(m: int, bound: int):
    if m < 1:
        return
    for a in range(1, min(math.isqrt(m), bound) + 1):
        if m % a == 0:
            yield a, m // a


def jump_factor(n: int, constants: Sequence[int], dials: Sequence[DialPair] | DialPair | None = None,
                factor_bound: int = 10 ** 6) -> FactorResult | None:
    """Jump from od6(n) to N = od6 + c on a Σ-series; factors of N sum to a candidate Δ."""
    if not constants:
        raise ConfigurationError("need at least one constant")
    if dials is None:
        dials = (BASE_DIALS_4K, BASE_DIALS_4K2)
    elif isinstance(dials, DialPair):
        dials = (dials,)
    seen = set()
    for dp in dials:
        od6 = deck_values(n, dp)[6]
        if od6 is None:
            continue
        for c in constants:
            target = od6 + c
            if target in seen:
                continue
            seen.add(target)
            for a, b in _pairs(target, factor_bound):
                hit = quadratic_factor(n, a + b, "equilibrium")
                if hit is not None:
                    return hit
    return None

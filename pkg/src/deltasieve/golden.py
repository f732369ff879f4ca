"""Regenerate the appendix tables from the parameters in data/table_catalog.json."""

from __future__ import annotations

import csv
import io
import json
import os
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .equilibrium import equilibrium_table
from .errors import ConfigurationError
from .series import DialPair, SeriesSpec, generate
from .steady_state import first_p_at_ssv


@lru_cache(maxsize=1)
def table_catalog() -> dict:
    text = resources.files("deltasieve").joinpath("data/table_catalog.json").read_text()
    return json.loads(text)


def parse_ids(text: str) -> list[int]:
    """"1-8,23,25-27" -> [1..8, 23, 25, 26, 27]."""
    out = []
    for part in text.split(","):
        lo, _, hi = part.partition("-")
        out.extend(range(int(lo), int(hi or lo) + 1))
    return out


def _row_cells(row, columns, zone_from_p):
    values = {
        "id": row.id, "p": row.p, "q": row.q, "n": row.n, "isqrt_n": row.isqrt_n,
        "d1": row.d1, "d2": row.d2, "d1_sq": row.d1 * row.d1, "d2_sq": row.d2 * row.d2,
    }
    for k, v in row.od.items():
        values[f"od{k}"] = v
    for k, v in row.df.items():
        values[f"df{k}"] = v
    if zone_from_p is not None:
        values["zone"] = "0" if row.p >= zone_from_p else "..."
    return ["undefined" if values[c] is None else str(values[c]) for c in columns]


def table_rows(number) -> tuple[list[str], list[list[str]]]:
    """Header and body cells of one appendix table."""
    key = f"{int(number):02d}"
    entry = table_catalog().get(key)
    if entry is None:
        raise ConfigurationError(f"table {number} is not in the catalog")
    if entry["kind"] == "equilibrium":
        rows = equilibrium_table(entry["value"], entry["rows"], entry["parity"])
        body = [[str(r.n_sum), str(r.od6_delta), str(r.constant), "" if r.df is None else str(r.df)]
                for r in rows]
        return ["n_sum", "od6_delta", "constant", "df"], body
    dials = DialPair.parse(entry["dials"])
    spec = SeriesSpec(entry["kind"], entry["value"], entry["parity"], (dials,))
    ids = parse_ids(entry["ids"])
    generated = generate(spec, max(ids))
    columns = entry["columns"]
    zone_from_p = None
    if "zone" in columns:
        zone_from_p = first_p_at_ssv(entry["value"], dials, entry["parity"])
    body = [_row_cells(generated[i - 1], columns, zone_from_p) for i in ids]
    return list(columns), body


def table_csv(number) -> str:
    header, body = table_rows(number)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(body)
    return buf.getvalue()


def write_golden_tables(out_dir, numbers=None) -> list[Path]:
    """Write table_NN.csv files; each file lands atomically via a rename."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    numbers = sorted(table_catalog()) if numbers is None else [f"{int(n):02d}" for n in numbers]
    written = []
    for key in numbers:
        path = out / f"table_{key}.csv"
        tmp = path.with_suffix(".csv.tmp")
        tmp.write_text(table_csv(key))
        os.replace(tmp, path)
        written.append(path)
    return written

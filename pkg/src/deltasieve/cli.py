"""deltasieve command line.

Exit codes: 0 success, 1 no result, 2 usage or input error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import equilibrium as eq
from . import factorizer as fz
from . import figures, golden, trapdoor, zones
from .errors import (CodecError, ConfigurationError, DeltaSieveError, DomainError,
                     InvalidKeyError, MessageTooLargeError, NoClosedFormError,
                     UnsupportedDeltaError)
from .series import DialPair, SeriesSpec, generate, parse_deck, rows_to_csv
from .steady_state import SsvQuery, first_p_at_ssv, invert_ssv, ssv_closed_form

EXIT_OK, EXIT_NO_RESULT, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

USER_ERRORS = (ConfigurationError, DomainError, UnsupportedDeltaError, CodecError,
               MessageTooLargeError, InvalidKeyError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("DELTASIEVE_THREADS", "1")))
    except ValueError:
        return 1


def _dials(text: str) -> DialPair:
    try:
        return DialPair.parse(text)
    except ConfigurationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _decks(text: str) -> list[int]:
    try:
        return [parse_deck(t) for t in text.split(",") if t.strip()]
    except ConfigurationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _kv(pairs) -> str:
    return ",".join(f"{k}={v}" for k, v in pairs) + "\n"


def _pretty(text: str) -> str:
    """Align CSV columns for reading; key=value output passes through."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or any("=" in c for c in rows[0]):
        return text
    widths = [max(len(r[i]) if i < len(r) else 0 for r in rows) for i in range(len(rows[0]))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in rows)


def _factor_line(n, res: fz.FactorResult, steps=None) -> str:
    pairs = [("n", n), ("p", res.p), ("q", res.q), ("delta", res.delta), ("method", res.method)]
    if steps is not None:
        pairs.append(("steps", steps))
    return _kv(pairs)


# ---------------------------------------------------------------- commands

def cmd_series(a):
    if (a.delta is None) == (a.sum is None):
        raise ConfigurationError("give exactly one of --delta or --sum")
    kind, value = ("delta", a.delta) if a.delta is not None else ("sum", a.sum)
    spec = SeriesSpec(kind, value, a.parity, tuple(a.dials or [DialPair(0, -1, 2, 2)]),
                      decks=a.decks)
    rows = generate(spec, a.rows, first_id=a.first_id, stop_deck=a.stop_deck)
    return EXIT_OK, rows_to_csv(rows)


def cmd_zones(a):
    spec = SeriesSpec("delta", a.delta, a.parity, tuple(a.dials or [DialPair(0, -1, 2, 2)]))
    rows = generate(spec, a.rows)
    found, marks = zones.detect_zones(rows, zones.criterion_for(a.deck))
    zones.attach_forms(found, a.delta, spec.dials, spec.p_parity)
    marks = marks + zones.find_switchover_points(rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "deck", "zone_index", "id_start", "id_end", "value", "form_id"])
    for z in found:
        w.writerow(["zone", z.deck_name, z.zone_index, z.id_start,
                    "inf" if z.id_end is None else z.id_end, z.steady_value, z.form_id])
    for m in marks:
        w.writerow(["switchover_" + m.kind, f"od{m.deck}", "", m.id, m.id, m.df_anomaly, ""])
    return EXIT_OK, buf.getvalue()


def cmd_coverage(a):
    report = zones.coverage_report(a.delta, tuple(a.dials or [DialPair(-2, 2, 12, 12)]), a.decks,
                                   p_parity=a.parity, horizon=a.horizon)
    return EXIT_OK, report.to_csv()


def cmd_ssv(a):
    dials = tuple(a.dials) if a.dials else None
    if a.invert is not None:
        found = invert_ssv(a.deck, a.invert, dials)
        if not found:
            return EXIT_NO_RESULT, _kv([("deck", f"od{a.deck}"), ("value", a.invert), ("delta", "none")])
        return EXIT_OK, _kv([("deck", f"od{a.deck}"), ("value", a.invert),
                             ("delta", " ".join(map(str, found)))])
    if a.delta is None:
        raise ConfigurationError("give --delta or --invert")
    try:
        value = ssv_closed_form(SsvQuery(a.deck, a.delta, dials, a.parity, a.v, a.label))
    except NoClosedFormError as exc:
        return EXIT_NO_RESULT, _kv([("deck", f"od{a.deck}"), ("delta", a.delta), ("ssv", "none")]) \
            + f"# {exc}\n"
    return EXIT_OK, _kv([("deck", f"od{a.deck}"), ("delta", a.delta), ("ssv", value)])


def cmd_first_p(a):
    dials = a.dials[0] if a.dials else DialPair(0, -1, 2, 2)
    p = first_p_at_ssv(a.delta, dials, a.parity)
    start = 1 if p % 2 else 2
    return EXIT_OK, _kv([("delta", a.delta), ("parity", a.parity), ("dials", dials),
                         ("p", p), ("id", (p - start) // 2 + 1)])


def cmd_factor(a):
    n = a.n
    if a.method == "quadratic":
        if a.delta is None:
            raise ConfigurationError("--method quadratic needs --delta")
        res = fz.quadratic_factor(n, a.delta)
    elif a.method == "zone0":
        res = fz.factor_zone0(n)
    elif a.method == "scan":
        out = fz.factor_scan(n, budget=a.budget)
        if out.result is None:
            return EXIT_NO_RESULT, _kv([("n", n), ("result", "none"), ("steps", out.steps)])
        return EXIT_OK, _factor_line(n, out.result, out.steps)
    elif a.method == "connect":
        res = fz.od_connect_factor(n, a.dials[0] if a.dials else DialPair(0, -1, 2, 2))
    elif a.method == "reflection":
        res = fz.od6_factor(n, a.dials[0] if a.dials else DialPair(-1, 0, 2, 2), budget=a.budget)
    elif a.method == "equilibrium":
        res = eq.jump_factor(n, a.constants or [0, 1])
    else:
        res = fz.factor_zone0(n)
        if res is None:
            out = fz.factor_scan(n, budget=a.budget)
            res = out.result
    if res is None:
        return EXIT_NO_RESULT, _kv([("n", n), ("result", "none")])
    return EXIT_OK, _factor_line(n, res)


def cmd_neighbors(a):
    ranges = fz.neighbor_ranges(a.n, a.dials[0] if a.dials else DialPair(-1, 0, 2, 2))
    return EXIT_OK, "which,lo,hi\n" + "".join(f"{r.which},{r.lo},{r.hi}\n" for r in ranges)


def cmd_connect(a):
    step = fz.od_connect_step(a.n, a.dials[0] if a.dials else DialPair(0, -1, 2, 2), a.relation)
    pairs = [("n", step.n), ("n_next", step.n_next), ("relation", step.relation),
             ("d1_next", step.d1_next)]
    pairs += [(f"od{k}_next", v) for k, v in step.od_next.items()]
    pairs.append(("df4_next", step.df4_next))
    return EXIT_OK, _kv(pairs)


def cmd_reflect(a):
    spec = SeriesSpec("delta", a.delta, a.parity, tuple(a.dials or [DialPair(-1, 0, 2, 2)]))
    marks = fz.reflection_scan(generate(spec, a.rows), min_span=a.min_span)
    body = "".join(f"{m.label},{m.x},{m.y},{m.gap},{m.center_ids[0]},{m.center_ids[1]},{m.span}\n"
                   for m in marks)
    return (EXIT_OK if marks else EXIT_NO_RESULT), "mark,x,y,gap,id_left,id_right,span\n" + body


def cmd_od6_search(a):
    found = fz.od6_search(a.n, a.dials[0] if a.dials else DialPair(-1, 0, 2, 2),
                          a.direction, a.budget, a.target)
    body = "".join(f"{c.m},{' '.join(map(str, c.deltas))}\n" for c in found)
    return (EXIT_OK if found else EXIT_NO_RESULT), "m,deltas\n" + body


def cmd_interdelta(a):
    rec = fz.inter_delta_verify(a.known_delta, a.id, a.dials[0] if a.dials else DialPair(0, -1, 8, 8),
                                a.n)
    fmt = lambda zs: " ".join(f"od{d}:{v}" for d, v in zs) or "none"
    pairs = [("known_delta", rec.known_delta), ("id", rec.id), ("known_zones", fmt(rec.known_zones)),
             ("n", rec.n_unknown), ("unknown_delta", rec.unknown_delta),
             ("unknown_id", rec.unknown_id), ("unknown_zones", fmt(rec.unknown_zones)),
             ("verified", str(rec.verified).lower())]
    return (EXIT_OK if rec.verified else EXIT_NO_RESULT), _kv(pairs)


def cmd_equilibrium(a):
    if a.anchor:
        anc = eq.equilibrium_anchor(a.delta, a.parity)
        return EXIT_OK, _kv([("delta", anc.delta), ("parity", anc.parity), ("n_anchor", anc.n_anchor),
                             ("od6_ssv", anc.od6_ssv)])
    return EXIT_OK, eq.equilibrium_csv(eq.equilibrium_table(a.delta, a.rows, a.parity))


def cmd_gec(a):
    return EXIT_OK, eq.gec_csv(eq.gec_growth(a.start, a.end, a.parity, a.mode))


def cmd_encrypt(a):
    c, key, trace = trapdoor.encrypt(a.message, a.delta, a.mode)
    text = f"delta={a.delta}\nciphertext={c.od6}\nprivate={key.constant}\n"
    if a.trace:
        text += "".join(f"{k}={v}\n" for k, v in trace.as_dict().items())
    return EXIT_OK, text


def cmd_decrypt(a):
    if a.key:
        data = trapdoor.read_key_file(a.key)
        delta, c, private = data["delta"], data["ciphertext"], data["private"]
    else:
        if None in (a.delta, a.ciphertext, a.private):
            raise ConfigurationError("give --key or all of --delta, --ciphertext, --private")
        delta, c, private = a.delta, a.ciphertext, a.private
    message = trapdoor.decrypt(c, private, delta, a.mode)
    return EXIT_OK, f"message={message.decode('latin-1')}\n"


def cmd_golden(a):
    if not a.out:
        raise ConfigurationError("golden-tables needs --out DIR")
    numbers = a.tables or sorted(golden.table_catalog())
    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        paths = [p for batch in pool.map(lambda n: golden.write_golden_tables(a.out, [n]), numbers)
                 for p in batch]
    return EXIT_OK, "".join(f"{p}\n" for p in paths), True


def cmd_plot_data(a):
    opts = {}
    if a.figure == "coverage-growth" and a.deltas:
        opts["deltas"] = a.deltas
    elif a.figure == "a-graph":
        if a.deltas:
            opts["deltas"] = a.deltas
        if a.v is not None:
            opts["v"] = a.v
    elif a.figure == "rsa-unsafe-zone":
        if a.deltas:
            opts["delta"] = a.deltas[0]
        if a.iterations is not None:
            opts["iterations"] = a.iterations
    elif a.figure == "gec-growth":
        opts.update(start=a.start, end=a.end)
    elif a.figure == "residue":
        opts["end"] = a.end
    return EXIT_OK, figures.figure_csv(a.figure, **opts)


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--pretty", action="store_true", help="align columns for reading")

    parser = _Parser(prog="deltasieve", description="Δ-series sieving, factoring and equilibrium tools")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    def dials(p, required=False):
        p.add_argument("--dials", type=_dials, action="append", required=required,
                       help="a1,a2,v1,v2 (repeat for a second pair)")

    def parity(p):
        p.add_argument("--parity", default="odd", choices=["odd", "even"])

    p = add("series", cmd_series, "generate Δ- or Σ-series rows")
    p.add_argument("--delta", type=int)
    p.add_argument("--sum", type=int)
    parity(p)
    dials(p)
    p.add_argument("--rows", type=int)
    p.add_argument("--first-id", type=int, default=1)
    p.add_argument("--decks", type=_decks)
    p.add_argument("--stop-deck")

    p = add("zones", cmd_zones, "detect zones and switchover marks")
    p.add_argument("--delta", type=int, required=True)
    parity(p)
    dials(p)
    p.add_argument("--deck", type=parse_deck, default=4)
    p.add_argument("--rows", type=int, default=64)

    p = add("coverage", cmd_coverage, "zone coverage report")
    p.add_argument("--delta", type=int, required=True)
    parity(p)
    dials(p)
    p.add_argument("--decks", type=_decks, default=[1, 2, 4, 5])
    p.add_argument("--horizon", type=int)

    p = add("ssv", cmd_ssv, "closed-form steady value, or invert one with --invert")
    p.add_argument("--deck", type=parse_deck, required=True)
    p.add_argument("--delta", type=int)
    parity(p)
    dials(p)
    p.add_argument("--v", type=int)
    p.add_argument("--label")
    p.add_argument("--invert", type=int)

    p = add("first-p", cmd_first_p, "first p of zone₀ for a base dial pair")
    p.add_argument("--delta", type=int, required=True)
    parity(p)
    dials(p)

    p = add("factor", cmd_factor, "factor n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", default="auto",
                   choices=["auto", "quadratic", "zone0", "scan", "connect", "reflection", "equilibrium"])
    p.add_argument("--delta", type=int)
    p.add_argument("--budget", type=int, default=64)
    p.add_argument("--constants", type=lambda s: [int(t) for t in s.split(",")])
    dials(p)

    p = add("neighbors", cmd_neighbors, "ranges of the previous and next same-Δ composites")
    p.add_argument("--n", type=int, required=True)
    dials(p)

    p = add("connect", cmd_connect, "predict the next same-Δ composite")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--relation", default="od3_quarter", choices=["od3_quarter", "steady"])
    dials(p)

    p = add("reflect", cmd_reflect, "od6 reflection marks along a series")
    p.add_argument("--delta", type=int, required=True)
    parity(p)
    dials(p)
    p.add_argument("--rows", type=int, default=40)
    p.add_argument("--min-span", type=int, default=2)

    p = add("od6-search", cmd_od6_search, "walk candidates sharing a target od6")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--direction", default="down", choices=["up", "down", "both"])
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--target", type=int)
    dials(p)

    p = add("interdelta", cmd_interdelta, "verify a known/unknown Δ zone link")
    p.add_argument("--known-delta", type=int, required=True)
    p.add_argument("--id", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    dials(p)

    p = add("equilibrium", cmd_equilibrium, "equilibrium constants table")
    p.add_argument("--delta", type=int, required=True)
    parity(p)
    p.add_argument("--rows", type=int)
    p.add_argument("--anchor", action="store_true")

    p = add("gec", cmd_gec, "gec/nce/residue growth")
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--end", type=int, required=True)
    parity(p)
    p.add_argument("--mode", default="position", choices=["position", "multiset"])

    p = add("trapdoor-encrypt", cmd_encrypt, "encrypt a message")
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--message", required=True)
    p.add_argument("--mode", default="ascii2", choices=list(trapdoor.CODEC_MODES))
    p.add_argument("--trace", action="store_true")

    p = add("trapdoor-decrypt", cmd_decrypt, "decrypt a ciphertext")
    p.add_argument("--delta", type=int)
    p.add_argument("--ciphertext", type=int)
    p.add_argument("--private", type=int)
    p.add_argument("--key", help="key file with delta=, ciphertext=, private= lines")
    p.add_argument("--mode", default="ascii2", choices=list(trapdoor.CODEC_MODES))

    p = add("golden-tables", cmd_golden, "write the appendix tables as CSV")
    p.add_argument("--tables", type=lambda s: [int(t) for t in s.split(",")])

    p = add("plot-data", cmd_plot_data, "emit a figure's dataset")
    p.add_argument("--figure", required=True, choices=list(figures.FIGURES))
    p.add_argument("--deltas", type=lambda s: [int(t) for t in s.split(",")])
    p.add_argument("--v", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--start", type=int, default=20)
    p.add_argument("--end", type=int, default=100)
    return parser


def _join_negative_values(argv: list[str]) -> list[str]:
    """Turn ["--dials", "-1,0,2,2"] into ["--dials=-1,0,2,2"] so the value is not read as a flag."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (tok.startswith("--") and "=" not in tok and nxt is not None
                and re.match(r"^-\d", nxt)):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"deltasieve: {exc}", file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        result = args.func(args)
    except USER_ERRORS as exc:
        print(f"deltasieve: {exc}", file=stderr)
        return EXIT_USAGE
    except DeltaSieveError as exc:
        print(f"deltasieve: {exc}", file=stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"deltasieve: {exc}", file=stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # anything unexpected is a bug
        print(f"deltasieve: internal error: {exc!r}", file=stderr)
        return EXIT_INTERNAL
    code, text = result[0], result[1]
    wrote_files = len(result) > 2 and result[2]
    if args.pretty:
        text = _pretty(text)
    if args.out and not wrote_files:
        path = Path(args.out)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(text)
        os.replace(tmp, path)
    else:
        stdout.write(text)
    return code


def main():
    sys.exit(run())

"""Batch experiment driver.

Subcommands:

    run             validate a tower, compute its splitting data, enumerate
                    levels, and emit a verdict (table, json, or csv)
    de analyze      singularity/exponent table of a differential operator
    de pullback     emit the pullback of an operator along a map
    ss table        Deuring/supersingular data over a range of primes
    modular genus   the genus of X_0(N)

Exit codes: 0 success, 2 configuration or parse error, 3 resource-guard
exhaustion, 4 invariant violation (a report is still written when possible).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional

from .fields import FieldError, GuardExceeded, make_field
from .ratfunc import parse_ratfunc, ratfunc_to_text
from .fuchsian import (
    FuchsianOperator,
    gauss_operator,
    pullback_operator,
    singular_points,
)
from .tower import (
    CorrespondenceInvalid,
    TowerSpec,
    enumerate_level,
    minimal_splitting_field,
    optimality_report,
    splitting_set,
)
from .towerio import (
    TowerDefinitionError,
    dumps_report,
    report_to_json,
    tower_from_file,
)
from . import modular

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3
EXIT_INVARIANT = 4

OPERATOR_FIXTURES = {
    "gauss": gauss_operator,
    "jline": modular.jline_operator,
}


def _parse_range(text: str, what: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..", 1)
        a, b = int(lo), int(hi)
    except ValueError:
        raise SystemExit2(f"bad {what} range {text!r}: expected like 0..3")
    if b < a:
        raise SystemExit2(f"empty {what} range {text!r}")
    return a, b


class SystemExit2(Exception):
    """Configuration error carrying the message for exit code 2."""


def _resolve_tower(args) -> TowerSpec:
    if args.fixture and args.file:
        raise SystemExit2("--fixture and --file are mutually exclusive")
    if args.fixture:
        if args.p is None:
            raise SystemExit2("--fixture needs --p")
        return modular.builtin_fixture(args.fixture, args.p)
    if args.file:
        return tower_from_file(args.file)
    raise SystemExit2("need --fixture NAME or --file PATH")


def _resolve_operator(args) -> FuchsianOperator:
    if args.fixture:
        if args.p is None:
            raise SystemExit2("--fixture needs --p")
        try:
            ctor = OPERATOR_FIXTURES[args.fixture]
        except KeyError:
            raise SystemExit2(
                f"unknown operator fixture {args.fixture!r}: choose from "
                f"{sorted(OPERATOR_FIXTURES)}"
            )
        return ctor(make_field(args.p, 1))
    if args.a1 and args.a2:
        if args.p is None:
            raise SystemExit2("--a1/--a2 need --p")
        field = make_field(args.p, 1)
        return FuchsianOperator(parse_ratfunc(args.a1, field), parse_ratfunc(args.a2, field))
    raise SystemExit2("need --fixture NAME or both --a1 and --a2")


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def _cmd_run(args) -> int:
    ts: Optional[TowerSpec] = None
    violation = False
    try:
        ts = _resolve_tower(args)
    except CorrespondenceInvalid as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    m_lo, m_hi = _parse_range(args.levels, "level")
    if ts.enum_guard != args.max_enum or ts.scan_guard != args.max_scan:
        ts = TowerSpec(
            name=ts.name,
            corr=ts.corr,
            witness=ts.witness,
            enum_guard=args.max_enum,
            scan_guard=args.max_scan,
            pullback_of=ts.pullback_of,
            modular_level=ts.modular_level,
        )

    split = None
    msf = None
    verdict = None
    levels = []
    try:
        if ts.corr.solution is not None:
            split = splitting_set(ts.corr, ext_bound=args.ext_bound, scan_guard=ts.scan_guard)
            msf = minimal_splitting_field(
                ts.corr, k_max=args.max_ext, split=split, scan_guard=ts.scan_guard
            )
            verdict = optimality_report(ts, k_max=args.max_ext, scan_guard=ts.scan_guard)
        k = args.k or (msf.degree if msf and msf.degree else 1)
        split_pts = split.points_over(make_field(ts.field.p, k * ts.field.k)) if split else None
        for m in range(m_lo, m_hi + 1):
            levels.append(enumerate_level(ts, m, k, split_points=split_pts))
    except GuardExceeded as exc:
        print(f"guard exhausted: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except CorrespondenceInvalid as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        violation = True

    guards = {"max_enum": args.max_enum, "max_scan": args.max_scan, "max_ext": args.max_ext}
    doc = report_to_json(ts, split, msf, levels, verdict, seed=args.seed, guards=guards)
    if ts.modular_level is not None:
        ml = modular.modular_limits(ts.modular_level, ts.field.p)
        doc["modular_limits"] = {
            "level": ml.ell,
            "genus_limit": f"{ml.genus_limit.numerator}/{ml.genus_limit.denominator}",
            "split_lower": f"{ml.split_lower.numerator}/{ml.split_lower.denominator}",
        }

    text = _format_report(doc, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_INVARIANT if violation else EXIT_OK


def _format_report(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps_report(doc)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["p", "m", "k", "count", "split_count", "above_singular"])
        for lv in doc["levels"]:
            writer.writerow(
                [doc["tower"]["p"], lv["m"], lv["k"], lv["count"], lv["split_count"], lv["above_singular"]]
            )
        return buf.getvalue()
    # aligned plain-text table
    lines = []
    tower = doc["tower"]
    lines.append(f"tower {tower['name']}  p={tower['p']} k={tower['k']} delta={tower['delta']}")
    lines.append("assumptions: " + ", ".join(f"{k}={v}" for k, v in doc["assumptions"].items()))
    if doc.get("witness"):
        w = doc["witness"]
        lines.append(
            f"totally branched witness: {w['point']} (ext degree {w['ext_degree']}, "
            f"certified={w['certified_all_levels']})"
        )
    sp = doc.get("splitting")
    if sp:
        lines.append(
            f"splitting: count={sp['count']} complete={sp['complete']} "
            f"searched degrees={sp['searched_degrees']} minimal degree={sp['minimal_splitting_degree']}"
        )
    if doc.get("modular_limits"):
        ml = doc["modular_limits"]
        lines.append(
            f"modular limits (level {ml['level']}): genus limit {ml['genus_limit']}, "
            f"split lower bound {ml['split_lower']}"
        )
    if doc["levels"]:
        header = f"{'m':>3} {'k':>3} {'count':>8} {'split':>8} {'above_sing':>11}"
        lines.append(header)
        for lv in doc["levels"]:
            lines.append(
                f"{lv['m']:>3} {lv['k']:>3} {lv['count']:>8} {lv['split_count']:>8} "
                f"{lv['above_singular']:>11}"
            )
    v = doc.get("verdict")
    if v:
        opt = "optimal criterion satisfied" if v["optimal"] else "optimality not certified"
        good = "certified good" if v["good"] else "not certified good"
        lines.append(f"verdict: {good}; {opt}" + (f" (via {v['optimal_via']})" if v["optimal_via"] else ""))
        lines.append(
            f"  split count {v['split_count']}, genus bound {v['genus_bound']}, "
            f"nu >= {v['nu_lower']}, lambda >= {v['lambda_lower']}"
        )
        for note in v["notes"]:
            lines.append(f"  note: {note}")
    else:
        lines.append("verdict: not certified good (no splitting data)")
    lines.append(f"guards: {doc['guards']}  seed: {doc['seed']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# de analyze / de pullback
# ---------------------------------------------------------------------------

def _cmd_de_analyze(args) -> int:
    op = _resolve_operator(args)
    rows = []
    for data in singular_points(op):
        exps = ",".join(repr(e) for e in data.exponents)
        lifts = ",".join("-" if f is None else str(f) for f in data.exponent_lifts)
        rows.append((repr(data.place), exps, lifts, "yes" if data.apparent else "no"))
    widths = [max(len(r[i]) for r in rows + [("place", "exponents", "lifts", "apparent")]) for i in range(4)]
    header = ("place", "exponents", "lifts", "apparent")
    out = [" ".join(h.ljust(w) for h, w in zip(header, widths))]
    for r in rows:
        out.append(" ".join(c.ljust(w) for c, w in zip(r, widths)))
    print("\n".join(out))
    return EXIT_OK


def _cmd_de_pullback(args) -> int:
    op = _resolve_operator(args)
    field = op.field
    f = parse_ratfunc(args.map, field)
    new = pullback_operator(op, f)
    print(json.dumps({"a1": ratfunc_to_text(new.a1), "a2": ratfunc_to_text(new.a2)}, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# ss table / modular genus
# ---------------------------------------------------------------------------

def _cmd_ss_table(args) -> int:
    lo, hi = _parse_range(args.p_range, "prime")
    from .fields import is_prime

    rows = [("p", "deg_phi", "alpha", "delta", "epsilon", "quadratic", "criterion")]
    for p in range(max(lo, 5), hi + 1):
        if not is_prime(p):
            continue
        data = modular.supersingular_poly(p)
        rat = modular.rationality_checks(p)
        crit = modular.splitting_criterion_mod8(p)
        rows.append(
            (
                str(p),
                str(data.deuring.degree),
                str(data.alpha),
                str(data.delta),
                str(data.epsilon),
                "yes" if rat.deuring_roots_quadratic else "no",
                "yes" if crit else "no",
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        print(" ".join(c.rjust(w) for c, w in zip(r, widths)))
    return EXIT_OK


def _cmd_modular_genus(args) -> int:
    inv = modular.x0_invariants(args.N)
    print(inv.genus)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def _add_operator_args(sp) -> None:
    sp.add_argument("--fixture", help="operator fixture name (gauss, jline)")
    sp.add_argument("--p", type=int, help="characteristic")
    sp.add_argument("--a1", help="first-order coefficient, as \"num/den\" lists")
    sp.add_argument("--a2", help="zeroth-order coefficient, as \"num/den\" lists")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="detowers", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="validate, enumerate, and report on a tower")
    run.add_argument("--fixture", help=f"tower fixture: {', '.join(modular.FIXTURE_NAMES)}")
    run.add_argument("--file", help="tower definition JSON file")
    run.add_argument("--p", type=int, help="characteristic (with --fixture)")
    run.add_argument("--levels", default="0..2", help="level range, e.g. 0..3")
    run.add_argument("--k", type=int, default=None,
                     help="extension degree for counting (default: minimal splitting degree)")
    run.add_argument("--ext-bound", type=int, default=None, dest="ext_bound",
                     help="extension search bound for the splitting set")
    run.add_argument("--max-enum", type=int, default=10**6, dest="max_enum")
    run.add_argument("--max-scan", type=int, default=10**7, dest="max_scan")
    run.add_argument("--max-ext", type=int, default=6, dest="max_ext")
    run.add_argument("--format", choices=("table", "json", "csv"), default="table")
    run.add_argument("--output", help="write the report here instead of stdout")
    run.add_argument("--seed", type=int, default=0, help="seed for sampled spot checks")
    run.set_defaults(func=_cmd_run)

    de = sub.add_parser("de", help="differential-operator tools")
    de_sub = de.add_subparsers(dest="de_command", required=True)
    analyze = de_sub.add_parser("analyze", help="singularities and local exponents")
    _add_operator_args(analyze)
    analyze.set_defaults(func=_cmd_de_analyze)
    pull = de_sub.add_parser("pullback", help="pull an operator back along a map")
    _add_operator_args(pull)
    pull.add_argument("--map", required=True, help="the cover, as \"num/den\" lists")
    pull.set_defaults(func=_cmd_de_pullback)

    ss = sub.add_parser("ss", help="supersingular data")
    ss_sub = ss.add_subparsers(dest="ss_command", required=True)
    table = ss_sub.add_parser("table", help="one row per prime")
    table.add_argument("--p-range", required=True, dest="p_range", help="e.g. 5..31")
    table.set_defaults(func=_cmd_ss_table)

    mod = sub.add_parser("modular", help="classical modular-curve invariants")
    mod_sub = mod.add_subparsers(dest="modular_command", required=True)
    genus = mod_sub.add_parser("genus", help="genus of X_0(N)")
    genus.add_argument("N", type=int)
    genus.set_defaults(func=_cmd_modular_genus)

    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TowerDefinitionError as exc:
        print(f"definition error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GuardExceeded as exc:
        print(f"guard exhausted: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except CorrespondenceInvalid as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (FieldError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

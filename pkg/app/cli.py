# app/cli.py

import argparse
import dataclasses
import logging
import sys

from app import __version__
from app.arith import descent2, diophantine, elliptic, pell
from app.arith.family import FamilyBox, FamilyParams
from app.arith.ntheory import parse_int, parse_rat
from app.core.config import settings
from app.core.errors import EXIT_INCONCLUSIVE, EXIT_OK, NtkitError, UsageError, exit_code_for
from app.core.logging import setup_logging
from app.jobs import runner
from app.output.schema import make_manifest
from app.output.writer import FORMATS, OutputWriter

log = logging.getLogger("cli")

# not part of the manifest: they never change the records
_RUNTIME_FLAGS = {"func", "jobs", "log_level", "timestamp", "seed", "format"}


class NtkitParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")

# ============================================================
# HELPERS
# ============================================================

def _int_list(text: str) -> list[int]:
    return [parse_int(part) for part in text.split(",") if part.strip()]


def _triple(text: str) -> tuple[int, int, int]:
    vals = _int_list(text)
    if len(vals) != 3:
        raise UsageError(f"expected three comma-separated integers, got {text!r}")
    return vals[0], vals[1], vals[2]


def _curve_json(E: elliptic.CurveQ) -> dict:
    return {"a": E.a, "b": E.b}

# ============================================================
# COMMANDS
# ============================================================

def cmd_pell(args, out: OutputWriter) -> int:
    if args.divisibility:
        if args.m is None or args.n is None:
            raise UsageError("--divisibility needs --m and --n")
        rep = pell.divisibility_report(args.a, args.m, args.n)
        out.record({
            **dataclasses.asdict(rep),
            "classical_law_holds": rep.classical_law_holds,
            "stated_law_holds": rep.stated_law_holds,
        })
    elif args.scan:
        if args.m is None or args.n is None:
            raise UsageError("--scan needs --m and --n as index maxima")
        for a, m, n in pell.stated_form_counterexamples(args.a, args.m, args.n):
            out.record({"a": a, "m": m, "n": n})
    elif args.bound is not None:
        for x, y in pell.enumerate_solutions_below(args.a, args.bound):
            out.record({"a": args.a, "x": x, "y": y})
    else:
        for s in pell.pell_sequence(args.a, args.count):
            out.record({"a": s.a, "index": s.index, "x": s.x, "y": s.y})
    return EXIT_OK


def cmd_dioph(args, out: OutputWriter) -> int:
    if args.set:
        S = diophantine.NAMED_SETS[args.set]()
    elif args.poly:
        S = diophantine.set_from_text(args.poly, args.n_params, args.m_witnesses)
    else:
        raise UsageError("give a polynomial or --set")

    params = tuple(_int_list(args.params))
    res = diophantine.member_search(S, params, args.bound, jobs=args.jobs)
    note = res.note
    if not res.is_member and S.poly == diophantine.four_squares_set().poly and params[0] < 0:
        note = diophantine.nonneg_witness(params[0]).note

    out.record({
        "set": S.name or None,
        "params": list(params),
        "status": res.status.value,
        "witness": list(res.witness) if res.witness is not None else None,
        "bound_used": res.bound_used,
        "note": note,
    })
    return EXIT_OK if res.is_member else EXIT_INCONCLUSIVE


def cmd_curve(args, out: OutputWriter) -> int:
    E = elliptic.CurveQ(parse_rat(args.a), parse_rat(args.b))
    rec: dict = {"curve": _curve_json(E)}

    if args.add:
        P, Q = (elliptic.parse_point(s) for s in args.add)
        rec["op"], rec["result"] = "add", elliptic.format_point(elliptic.add(E, P, Q))
    elif args.mul:
        k, P = parse_int(args.mul[0]), elliptic.parse_point(args.mul[1])
        rec["op"], rec["result"] = "mul", elliptic.format_point(elliptic.mul(E, k, P))
    elif args.neg:
        rec["op"], rec["result"] = "neg", elliptic.format_point(elliptic.neg(E, elliptic.parse_point(args.neg)))
    elif args.torsion:
        model = elliptic.scale_model(E)
        t = elliptic.is_torsion(model.curve, elliptic.to_scaled(model, elliptic.parse_point(args.torsion)))
        rec["op"], rec["result"] = "torsion", {"is_torsion": t.is_torsion, "order": t.order}
    elif args.search is not None:
        model = elliptic.scale_model(E)
        found = elliptic.naive_point_search(model.curve, args.search, jobs=args.jobs)
        rec["op"] = "search"
        rec["result"] = [elliptic.format_point(elliptic.from_scaled(model, P)) for P in found]
    else:
        rec["op"] = "info"
        rec["result"] = {"discriminant": elliptic.discriminant(E), "j": elliptic.j_invariant(E)}

    out.record(rec)
    return EXIT_OK


def cmd_descent(args, out: OutputWriter) -> int:
    if args.known_ranks:
        tally = runner.run_known_ranks(out.record, height=args.height or runner.DEFAULT_SEARCH_HEIGHT, jobs=args.jobs)
        return EXIT_OK if not tally["mismatches"] else EXIT_INCONCLUSIVE
    if not args.roots:
        raise UsageError("give --roots e1,e2,e3 or --known-ranks")

    C = descent2.SplitCurve(*_triple(args.roots))
    if args.height is None:
        out.record(descent2.two_selmer(C, jobs=args.jobs).to_json())
        return EXIT_OK

    point = elliptic.parse_point(args.point) if args.point else None
    w = descent2.rank_window(C, args.height, point=point, jobs=args.jobs)
    out.record({
        **w.report.to_json(),
        "window": [w.lower, w.upper],
        "certified": w.certified,
        "witness": elliptic.format_point(w.witness) if w.witness is not None else None,
    })
    return EXIT_OK


def cmd_family(args, out: OutputWriter) -> int:
    params = FamilyParams(*_triple(args.a))
    box = FamilyBox(m_max=args.m_max, n_max=args.n_max, m_min=args.m_min, n_min=args.n_min)
    tally = runner.run_family(
        params, box, out.record,
        search_height=args.height,
        certify=args.certify,
        prime_filter=not args.no_prime_filter,
        positive_only=args.positive_only,
        jobs=args.jobs,
    )
    return tally["status"]

# ============================================================
# PARSER
# ============================================================

def build_parser() -> argparse.ArgumentParser:
    common = NtkitParser(add_help=False)
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: settings.JOBS)")
    common.add_argument("--seed", type=int, default=None, help="seed for primality rounds above 2^64")
    common.add_argument("--timestamp", default=None, help="pin the manifest timestamp")
    common.add_argument("--budget", type=int, default=None, help="pollard rho iterations per cofactor")
    common.add_argument("--format", choices=FORMATS, default="jsonl")
    common.add_argument("--log-level", default=None)

    parser = NtkitParser(prog=settings.APP_NAME, description="Exact number theory toolkit")
    parser.add_argument("--version", action="version", version=f"{settings.APP_NAME} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("pell", parents=[common], formatter_class=fmt, help="x^2 - (a^2 - 1) y^2 = 1")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--count", type=int, default=10, help="sequence indices 0..count")
    p.add_argument("--divisibility", action="store_true", help="report y_m^2 | y_n against both criteria")
    p.add_argument("--scan", action="store_true", help="triples a<=A, m<=M, n<=N where the stated form fails")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--bound", type=int, default=None, help="brute-force enumeration up to y <= bound")
    p.set_defaults(func=cmd_pell)

    p = sub.add_parser("dioph", parents=[common], formatter_class=fmt, help="bounded witness search")
    p.add_argument("poly", nargs="?", default=None, help="e.g. 'x1 - y1^2 - y2^2 - y3^2 - y4^2'")
    p.add_argument("--set", choices=sorted(diophantine.NAMED_SETS), default=None)
    p.add_argument("--params", required=True, help="comma-separated parameter values")
    p.add_argument("--bound", type=int, default=10)
    p.add_argument("--n-params", type=int, default=None)
    p.add_argument("--m-witnesses", type=int, default=None)
    p.set_defaults(func=cmd_dioph)

    p = sub.add_parser("curve", parents=[common], formatter_class=fmt, help="y^2 = x^3 + a x + b over Q")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    ops = p.add_mutually_exclusive_group()
    ops.add_argument("--add", nargs=2, metavar="P")
    ops.add_argument("--mul", nargs=2, metavar=("K", "P"))
    ops.add_argument("--neg", metavar="P")
    ops.add_argument("--torsion", metavar="P")
    ops.add_argument("--search", type=int, metavar="H", help="naive point search to height H")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("descent", parents=[common], formatter_class=fmt, help="2-selmer bound for split cubics")
    p.add_argument("--roots", default=None, help="e1,e2,e3 (use --roots=-1,0,1 for a leading minus)")
    p.add_argument("--height", type=int, default=None, help="also search points and report the rank window")
    p.add_argument("--point", default=None, help="extra point for the lower bound, '(x, y)'")
    p.add_argument("--known-ranks", action="store_true", help="y^2 = x^3 - N^2 x for N = 1..7")
    p.set_defaults(func=cmd_descent)

    p = sub.add_parser("family", parents=[common], formatter_class=fmt, help="rank one pipeline over (m, n)")
    p.add_argument("--a", required=True, help="a1,a2,a3")
    p.add_argument("--m-min", type=int, default=1)
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--certify", action="store_true", help="run the 2-descent on every member")
    p.add_argument("--height", type=int, default=0, help="extra point search height per member")
    p.add_argument("--no-prime-filter", action="store_true", help="every coprime (m, n), not just four-prime ones")
    p.add_argument("--positive-only", action="store_true", help="all four forms must be positive primes")
    p.set_defaults(func=cmd_family)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)

    if args.budget is not None:
        settings.FACTOR_BUDGET = args.budget
    if args.seed is not None:
        settings.PRIME_SEED = args.seed

    params = {k: v for k, v in sorted(vars(args).items()) if k not in _RUNTIME_FLAGS}
    out = OutputWriter(args.format)
    out.manifest(make_manifest(args.command, params, args.timestamp, args.seed))

    try:
        status = args.func(args, out)
    except NtkitError as e:
        log.error(f"{args.command}: {e}")
        status = exit_code_for(e)
    except ValueError as e:
        log.error(f"{args.command}: {e}")
        status = exit_code_for(e)
    finally:
        out.close()

    log.info(f"{args.command} done: {out.count} records, exit {status}")
    return status

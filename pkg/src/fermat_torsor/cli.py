"""Command-line entry point.

Exit codes: 0 success, 2 usage error, 3 rejected precondition (including
malformed input files), 4 enumeration budget exceeded, 5 internal
consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .errors import ConsistencyError, FermatTorsorError, PreconditionError
from .fermat import DEFAULT_BUDGET, build_model, invariants_bruteforce, invariants_group
from .koszul import level_sweep
from .period import CSV_COLUMNS, compute_period, period_table, table_csv
from .snake import fermat_brauer_ladder, ladder_from_json, ladder_to_json, snake, verify_ladder

EXIT_OK = 0
EXIT_USAGE = 2


def _factors(G):
    return [str(d) for d in G.invariant_factors]


def _describe(factors):
    return " + ".join(f"Z/{d}" for d in factors) or "0"


def _csv(rows, columns):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (" ".join(v) if isinstance(v, list) else v) for k, v in row.items()})
    return buf.getvalue()


class Result:
    """A command's payload plus its csv and text renderings."""

    def __init__(self, payload, rows, columns, text):
        self.payload = payload
        self.rows = rows
        self.columns = columns
        self.text = text

    def render(self, fmt):
        if fmt == "json":
            return json.dumps(self.payload, indent=2) + "\n"
        if fmt == "csv":
            return self.rows if isinstance(self.rows, str) else _csv(self.rows, self.columns)
        return self.text.rstrip("\n") + "\n"


def _cert_text(c):
    lines = [f"m = {c.m}", f"period = {c.period}",
             f"invariants = {_describe(c.invariants_factors)}",
             f"degree image = {c.degree_image_generator}Z",
             f"torsor group = {_describe(c.torsor_group_factors)}",
             f"oracle checked = {'yes' if c.oracle_checked else 'no'}", "derivation:"]
    return "\n".join(lines + [f"  {s}" for s in c.derivation])


def cmd_period(args):
    c = compute_period(args.m, args.budget)
    return Result(c.to_json(), [c.csv_row()], CSV_COLUMNS, _cert_text(c))


def cmd_table(args):
    certs = period_table(args.m_from, args.m_to, parallel=args.parallel, budget=args.budget)
    text = "\n".join(
        f"m={c.m:>3}  period={c.period:>3}  oracle={'yes' if c.oracle_checked else 'no'}" for c in certs
    )
    return Result([c.to_json() for c in certs], table_csv(certs), CSV_COLUMNS, text)


def cmd_invariants(args):
    model = build_model(args.m)
    engine = _factors(invariants_group(model))
    payload = {"m": args.m, "invariants_factors": engine}
    text = f"invariants at m = {args.m}: {_describe(engine)}"
    if args.brute_force:
        brute = _factors(invariants_bruteforce(model, args.budget))
        if brute != engine:
            raise ConsistencyError(f"brute force gives {brute}, Smith normal form gives {engine}")
        payload["bruteforce_factors"] = brute
        payload["agree"] = True
        text += f"\nbrute force agrees: {_describe(brute)}"
    row = {"m": str(args.m), "invariants": engine}
    return Result(payload, [row], ["m", "invariants"], text)


def cmd_homology(args):
    payload = build_model(args.m).to_json()
    text = "\n".join(f"{k} = {v}" for k, v in payload.items())
    row = {k: (v if isinstance(v, list) else str(v)) for k, v in payload.items()}
    return Result(payload, [row], list(payload), text)


def cmd_cohomology(args):
    levels = args.level or [args.m]
    if any(n < 1 for n in levels):
        raise PreconditionError("levels must be positive")
    build_model(args.m)  # validates m before the sweep
    sweep = level_sweep(args.m, levels)
    data = sweep.to_json()
    if len(levels) == 1:
        payload = data["levels"][0]
    else:
        payload = data
    rows = data["levels"]
    text = "\n".join(
        f"m={r['m']} level={r['level']}: H0 = {_describe(r['h0'])}, H1 = {_describe(r['h1'])}, "
        f"H2 = {_describe(r['h2'])}"
        for r in rows
    )
    return Result(payload, rows, ["m", "level", "h0", "h1", "h2"], text)


def _six_term_result(seq, extra=None):
    payload = dict(extra or {})
    payload.update(seq.to_json())
    rows = [{"term": t["name"], "factors": t["factors"]} for t in payload["terms"]]
    text = "\n".join(f"{r['term']:>8} = {_describe(r['factors'])}" for r in rows)
    text += f"\nexact: {'yes' if seq.is_exact() else 'no'}"
    return Result(payload, rows, ["term", "factors"], text)


def cmd_snake(args):
    try:
        with open(args.ladder, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise PreconditionError(f"cannot read ladder file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"malformed JSON in {args.ladder}: {exc}") from None
    L = ladder_from_json(data)
    return _six_term_result(snake(L))


def cmd_fixture(args):
    L = fermat_brauer_ladder(args.m, args.l, args.r, same_level=args.same_level)
    report = verify_ladder(L)
    extra = {"m": args.m, "l": args.l, "r": args.r, "same_level": args.same_level,
             "ladder": ladder_to_json(L), "ladder_check": report.to_json()}
    return _six_term_result(snake(L), extra)


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--budget", type=_nonneg, default=DEFAULT_BUDGET,
                        help="maximum number of classes brute-force enumeration may visit")
    common.add_argument("--parallel", type=_positive, default=1, help="worker processes for tables")

    parser = argparse.ArgumentParser(
        prog="fermat-torsor",
        description="Exact computations for monodromy invariants and torsor periods of Fermat curves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("period", parents=[common], help="period certificate for one degree")
    p.add_argument("m", type=int)
    p.set_defaults(func=cmd_period)

    p = sub.add_parser("table", parents=[common], help="period certificates over a range")
    p.add_argument("--from", dest="m_from", type=int, required=True)
    p.add_argument("--to", dest="m_to", type=int, required=True)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("invariants", parents=[common], help="monodromy invariants of H1")
    p.add_argument("m", type=int)
    p.add_argument("--brute-force", action="store_true", help="also run the enumeration oracle")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("homology", parents=[common], help="orders in the matrix model of H1")
    p.add_argument("m", type=int)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("cohomology", parents=[common], help="Koszul cohomology of the Fermat module")
    p.add_argument("m", type=int)
    p.add_argument("--level", type=int, nargs="+", help="coefficient levels (default: m)")
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("snake", parents=[common], help="six-term sequence of a ladder file")
    p.add_argument("--ladder", required=True)
    p.set_defaults(func=cmd_snake)

    p = sub.add_parser("fixture-brauer", parents=[common], help="Brauer comparison ladder at finite level")
    p.add_argument("m", type=int)
    p.add_argument("l", type=int)
    p.add_argument("r", type=int)
    p.add_argument("--same-level", action="store_true",
                   help="keep both rows at Z/l^r instead of truncating the bottom row")
    p.set_defaults(func=cmd_fixture)
    return parser


def run(argv=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        result = args.func(args)
        text = result.render(args.format)
    except FermatTorsorError as exc:
        print(f"error: {exc}", file=stderr)
        return exc.exit_code
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=stderr)
            return PreconditionError.exit_code
    else:
        stdout.write(text)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

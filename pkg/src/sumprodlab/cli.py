"""Command-line driver: ``sumprodlab <command> [flags]``.

Exit status is 0 when every asserted check passes, 2 when one fails and 1 on
usage or resource errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import _accel, suites
from .errors import ResourceLimit, SumProdError, UsageError
from .report import ReportDocument
from .ring import Modulus, is_prime
from .serialize import histogram_csv
from .spectral import spectral_suite

COMMANDS = ("sumprod", "incidence", "bisectors", "conjecture", "spectral")
ZQ_COMMANDS = ("bisectors", "conjecture", "spectral")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--p", type=int, default=None, help="prime (zq commands need p = 3 mod 4)")
    common.add_argument("--k", type=int, default=3, help="exponent, q = p^k")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1, help="numba threads")
    common.add_argument("--budget-tuples", type=int, default=10**8)
    common.add_argument("--budget-seconds", type=float, default=None)
    common.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--config", type=Path, default=None, help="JSON file of flag defaults")

    parser = _Parser(prog="sumprodlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("sumprod", "incidence"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--family", choices=("ap", "gp", "random"), default="random")
        sp.add_argument("--n", type=int, default=8)
        if name == "incidence":
            sp.add_argument("--st-n", type=int, default=8, help="Szemeredi-Trotter grid size")
    sp = sub.add_parser("bisectors", parents=[common])
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--centres", type=int, default=50)
    sp.add_argument("--no-lemma-search", action="store_true")
    sp = sub.add_parser("conjecture", parents=[common])
    sp.add_argument("--x", default="auto", help="'auto' or 'x1,x2;y1,y2'")
    sp = sub.add_parser("spectral", parents=[common])
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--pairs", type=int, default=1000)
    sp.add_argument("--rows", type=int, default=None, help="stream only every n-th A^2 row")
    sp.add_argument("--tolerance", type=float, default=1e-6)
    return parser


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        try:
            cfg = json.loads(args.config.read_text())
        except (OSError, ValueError) as e:
            raise UsageError(f"cannot read config {args.config}: {e}") from None
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        # config supplies defaults; explicit flags win
        sub = parser._subparsers._group_actions[0].choices[args.command]
        unknown = set(cfg) - {a.dest for a in sub._actions}
        if unknown:
            raise UsageError(f"unknown config keys {sorted(unknown)}")
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    validate(args)
    return args


def validate(args):
    if args.p is not None and not is_prime(args.p):
        raise UsageError(f"--p {args.p} is not prime")
    if args.command in ZQ_COMMANDS:
        args.p = 3 if args.p is None else args.p
        if args.p % 4 != 3:
            raise UsageError(f"--p {args.p} is not 3 mod 4")
        if args.k != 3:
            raise UsageError("zq commands use k = 3")
        Modulus(args.p, args.k)
    if args.budget_tuples is not None and args.budget_tuples <= 0:
        raise UsageError("--budget-tuples must be positive")
    if args.budget_seconds is not None and args.budget_seconds <= 0:
        raise UsageError("--budget-seconds must be positive")
    if getattr(args, "n", 1) < 1:
        raise UsageError("--n must be positive")


def run(args) -> tuple[ReportDocument, dict | None]:
    """Run one command; returns the report and, for histograms, the histogram."""
    deadline = suites.Deadline(args.budget_seconds)
    hist = None
    if args.command == "sumprod":
        rep = suites.sumprod_report(args.family, args.n, args.p, args.seed)
    elif args.command == "incidence":
        rep = suites.incidence_report(args.family, args.n, args.p, args.seed, args.st_n, args.budget_tuples, deadline)
    elif args.command == "bisectors":
        rep = suites.bisectors_report(args.p, args.seed, args.samples, args.centres, not args.no_lemma_search, deadline)
    elif args.command == "conjecture":
        x = None if args.x == "auto" else suites.parse_pair(args.x)
        if args.p != 3:
            raise ResourceLimit("the reflection-pair census is only run at p = 3")
        rep, hist = suites.conjecture_report(args.p, x)
    else:
        if args.p != 3:
            raise ResourceLimit(f"the bisector graph at p = {args.p} has {args.p**9 + args.p**8} vertices")
        rows = None if args.rows is None else np.arange(0, args.p**9 + args.p**8, args.rows)
        rep, _ = spectral_suite(args.p, args.d, args.pairs, rows, args.seed, args.tolerance)
    deadline.check("writing the report")
    rep.config.update({"command": args.command, "seed": args.seed})
    return rep, hist


def render(rep: ReportDocument, hist: dict | None, fmt: str) -> str:
    if fmt == "json":
        doc = rep.to_dict()
        if hist is not None:
            doc["histogram"] = hist
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if hist is not None:
        return histogram_csv(hist["A"])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["section", "name", "lhs", "relation", "rhs", "asserted", "verdict"])
    for path, c in rep.all_checks():
        d = c.to_dict()
        w.writerow([path or rep.kind, d["name"], json.dumps(d["lhs"]), d["relation"], json.dumps(d["rhs"]), d["asserted"], d["verdict"]])
    return buf.getvalue()


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
        _accel.set_workers(args.workers)
        t0 = time.perf_counter()
        rep, hist = run(args)
        rep.wall_time = round(time.perf_counter() - t0, 6)
        text = render(rep, hist, args.format)
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except (SumProdError, ValueError) as e:
        print(f"sumprodlab: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    for path, c in rep.failures():
        print(f"FAILED {path}: {c.name} ({c.lhs} {c.relation} {c.rhs})", file=sys.stderr)
    return 0 if rep.passed else 2

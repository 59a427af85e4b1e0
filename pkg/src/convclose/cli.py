"""Command line interface.

Subcommands:
  run        scenario reports or full report tables (markdown/csv)
  constants  the explicit-constants table
  verify     the verification suites (exit code 3 on any failure)
  exact      exact one-dimensional distances, including custom measures

Exit codes: 0 success, 2 a requested bound is not applicable under
--strict, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import suites
from .constants import constants_table
from .expansion import exact_distance, expansion_input
from .measure import from_text
from .report import emit, format_value, paper_table, run_report
from .scenarios import ATOM_MODES, KINDS, ScenarioSpec, family_for, to_integer_line


def _write_out(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _spec_from_mapping(data: dict, defaults: dict) -> ScenarioSpec:
    merged = {**defaults, **data}
    return ScenarioSpec(
        kind=merged["kind"],
        n=int(merged["n"]),
        a=merged.get("a"),
        b=merged.get("b"),
        d=int(merged.get("d", 10)),
        ell=int(merged.get("ell", 1)),
        atom_mode=merged.get("atoms", "abstract-categorical"),
    )


def _cmd_run(args: argparse.Namespace) -> int:
    fmt = args.format
    if args.table is not None:
        _write_out(paper_table(args.table, fmt), args.out)
        return 0

    config = {}
    if args.config:
        config = json.loads(Path(args.config).read_text())
        fmt = args.format if args.format_given else config.get("format", fmt)

    defaults = {"d": args.d, "ell": args.ell, "atoms": args.atoms}
    specs: List[ScenarioSpec] = []
    if args.example:
        spec_data = {"kind": args.example, "n": args.n}
        if args.a is not None:
            spec_data["a"] = args.a
        if args.b is not None:
            spec_data["b"] = args.b
        specs = [_spec_from_mapping(spec_data, defaults)]
    elif config.get("scenarios"):
        specs = [_spec_from_mapping(s, defaults) for s in config["scenarios"]]
    else:
        print("nothing to run: pass --example, --table or a config with scenarios", file=sys.stderr)
        return 1

    rows = [run_report(s) for s in specs]
    _write_out(emit(rows, fmt), args.out or config.get("out"))
    if args.strict and any(not b.applicable for row in rows for b in row.bounds.values()):
        return 2
    return 0


def _cmd_constants(args: argparse.Namespace) -> int:
    tab = constants_table(args.ell_max)
    lines = [f"c1 = {tab.c1:.12f}", f"x0 = {tab.x0:.12f}", ""]
    lines.append("ell  x_ell         u_ell         xt_ell        ut_ell        s_ell")
    for ell in range(args.ell_max + 1):
        xt = f"{tab.xtilde_ell[ell]:.10f}" if ell in tab.xtilde_ell else "-"
        ut = f"{tab.utilde_ell[ell]:12.6f}" if ell in tab.utilde_ell else "-"
        s = f"{tab.s_ell[ell]:.10f}" if ell in tab.s_ell else "-"
        lines.append(
            f"{ell:<4d} {tab.x_ell[ell]:.10f}  {tab.u_ell[ell]:12.6f}  {xt:>12}  {ut:>12}  {s:>12}"
        )
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    chosen = []
    if args.suite in ("all", "identities"):
        chosen.append(suites.identity_suite())
    if args.suite in ("all", "smoothing"):
        chosen.append(suites.smoothing_suite(seed=args.seed, instances=args.instances))
    if args.suite in ("all", "zero-sum"):
        chosen.append(suites.zero_sum_suite(seed=args.seed))
    if args.suite in ("all", "dominance"):
        chosen.append(suites.dominance_suite(seed=args.seed, instances=args.instances))
    failed = False
    for res in chosen:
        print(res.summary())
        for msg in res.failures[:20]:
            print(f"    {msg}")
        failed = failed or not res.passed
    return 3 if failed else 0


def _cmd_exact(args: argparse.Namespace) -> int:
    if args.measures:
        ms = [from_text(Path(p).read_text()) for p in args.measures]
        g = from_text(Path(args.g).read_text()) if args.g else None
        inp = expansion_input(ms, g)
    else:
        if not args.example:
            print("pass --example or --measures", file=sys.stderr)
            return 1
        spec = ScenarioSpec(
            kind=args.example, n=args.n, a=args.a, b=args.b, d=args.d, ell=args.ell
        )
        inp = to_integer_line(family_for(spec))
    dist = exact_distance(inp, args.ell)
    print(f"exact_distance(ell={args.ell}) = {dist:.12e}  (display: {format_value(dist)})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="convclose",
        description="Total variation bounds for closeness of convolution products",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate scenario reports")
    run.add_argument("--config", help="JSON config with a 'scenarios' list")
    run.add_argument("--example", choices=[k for k in KINDS if k != "custom"])
    run.add_argument("--table", type=int, choices=range(1, 7), help="emit a standard table")
    run.add_argument("--n", type=int, default=100)
    run.add_argument("--a", type=float)
    run.add_argument("--b", type=float)
    run.add_argument("--d", type=int, default=10)
    run.add_argument("--ell", type=int, default=1)
    run.add_argument("--atoms", choices=list(ATOM_MODES), default="abstract-categorical")
    run.add_argument("--format", choices=["markdown", "csv"], default="markdown")
    run.add_argument("--out")
    run.add_argument("--strict", action="store_true", help="exit 2 if any bound is n.a.")
    run.set_defaults(func=_cmd_run)

    cons = sub.add_parser("constants", help="print the explicit constants")
    cons.add_argument("--ell-max", type=int, default=8)
    cons.add_argument("--out")
    cons.set_defaults(func=_cmd_constants)

    ver = sub.add_parser("verify", help="run the verification suites")
    ver.add_argument(
        "--suite",
        choices=["all", "identities", "smoothing", "zero-sum", "dominance"],
        default="all",
    )
    ver.add_argument("--seed", type=int, default=suites.DEFAULT_SEED)
    ver.add_argument("--instances", type=int, default=200)
    ver.set_defaults(func=_cmd_verify)

    ex = sub.add_parser("exact", help="exact one-dimensional distances")
    ex.add_argument("--example", choices=[k for k in KINDS if k != "custom"])
    ex.add_argument("--measures", nargs="+", help="measure text files (custom factors)")
    ex.add_argument("--g", help="optional reference measure file")
    ex.add_argument("--n", type=int, default=100)
    ex.add_argument("--a", type=float)
    ex.add_argument("--b", type=float)
    ex.add_argument("--d", type=int, default=10)
    ex.add_argument("--ell", type=int, default=1)
    ex.set_defaults(func=_cmd_exact)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        args.format_given = "--format" in argv
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())

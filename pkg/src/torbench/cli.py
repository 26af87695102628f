"""Command-line surface: one-off computations, document runs and suites.

Exit codes: 0 all pass, 1 any fail, 2 usage or parse error, 3 capped-only
outcomes.  WORKBENCH_SEED overrides the default seed; the --seed flag wins.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .workbench import (
    Report,
    WorkbenchError,
    builtin_document,
    exit_code,
    load,
    run,
)

USAGE_ERROR = 2


def _default_seed() -> int:
    env = os.environ.get("WORKBENCH_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--doc", help="JSON document with extra definitions ('-' for stdin)")
    p.add_argument("--seed", type=int, default=None, help="seed (default 0 or WORKBENCH_SEED)")
    p.add_argument("--bound", type=int, default=8, help="degree bound for 'for all n' claims")
    p.add_argument("--cap", type=int, default=32, help="stage cap for completions")
    p.add_argument(
        "--trials",
        type=int,
        default=None,
        help="trial count for probes (default 200; suites use their own defaults)",
    )
    p.add_argument(
        "--output", choices=("json", "text"), default="text", help="report format"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torbench",
        description="Exact homological algebra workbench over finite-dimensional algebras",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute every task in a document")
    p.add_argument("document", help="JSON document path ('-' for stdin)")
    _add_common(p)

    p = sub.add_parser("validate", help="validate all algebras and modules in scope")
    _add_common(p)

    p = sub.add_parser("tor", help="dim Tor_n(M, N) for a right M and left N")
    p.add_argument("n", type=int)
    p.add_argument("M")
    p.add_argument("N")
    _add_common(p)

    p = sub.add_parser("ext", help="dim Ext^n(M, N) for same-side M, N")
    p.add_argument("n", type=int)
    p.add_argument("M")
    p.add_argument("N")
    _add_common(p)

    p = sub.add_parser("tensor", help="dim M (x) N over the algebra")
    p.add_argument("M")
    p.add_argument("N")
    _add_common(p)

    p = sub.add_parser("relpd", help="relative projective dimension of M")
    p.add_argument("M")
    p.add_argument("torpair")
    _add_common(p)

    p = sub.add_parser("in-t", help="membership of M in the pair's left class")
    p.add_argument("M")
    p.add_argument("torpair")
    _add_common(p)

    p = sub.add_parser("xpure", help="purity of 0 -> <sub> -> M -> M/<sub> -> 0 against X")
    p.add_argument("M")
    p.add_argument("--sub-gens", required=True, help="JSON list of generator rows")
    p.add_argument("--x", nargs="+", required=True, metavar="MODULE")
    _add_common(p)

    p = sub.add_parser("hereditary-probe", help="sampled heredity checks for a pair")
    p.add_argument("torpair")
    _add_common(p)

    p = sub.add_parser("trace", help="trace of a module set in M")
    p.add_argument("M")
    p.add_argument("x", nargs="+", metavar="MODULE")
    _add_common(p)

    p = sub.add_parser("precover", help="build and certify a precover of M")
    p.add_argument("M")
    p.add_argument("g", nargs="+", metavar="GENERATOR")
    _add_common(p)

    p = sub.add_parser("preenvelope", help="build and certify a preenvelope of M")
    p.add_argument("M")
    p.add_argument("g", nargs="+", metavar="GENERATOR")
    _add_common(p)

    p = sub.add_parser("filtration-verify", help="verify a serialized filtration witness")
    p.add_argument("witness", help="witness JSON path ('-' for stdin)")
    p.add_argument("--gens", nargs="+", required=True, metavar="MODULE")
    _add_common(p)

    p = sub.add_parser("suite", help="run a named invariant suite ('all' for every one)")
    p.add_argument("name")
    _add_common(p)
    return parser


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _task_from_args(args: argparse.Namespace) -> dict:
    cmd = args.command
    task: dict = {"command": cmd}
    if cmd in ("tor", "ext"):
        task.update({"n": args.n, "M": args.M, "N": args.N})
    elif cmd == "tensor":
        task.update({"M": args.M, "N": args.N})
    elif cmd in ("relpd", "in-t"):
        task.update({"M": args.M, "torpair": args.torpair})
    elif cmd == "xpure":
        try:
            gens = json.loads(args.sub_gens)
        except json.JSONDecodeError as e:
            raise WorkbenchError("--sub-gens", f"not valid JSON: {e}") from e
        task.update({"ses": {"module": args.M, "sub_gens": gens}, "X": args.x})
    elif cmd == "hereditary-probe":
        task.update({"torpair": args.torpair})
    elif cmd == "trace":
        task.update({"M": args.M, "X": args.x})
    elif cmd in ("precover", "preenvelope"):
        task.update({"M": args.M, "G": args.g})
    elif cmd == "filtration-verify":
        task.update(
            {"witness": json.loads(_read_source(args.witness)), "G": args.gens}
        )
    elif cmd == "suite":
        task["name"] = args.name
        if args.trials is not None:
            task["trials"] = args.trials
    return task


def _print_reports(reports: list[Report], output: str) -> None:
    for rep in reports:
        if output == "json":
            print(rep.to_json())
        else:
            cmd = rep.task.get("command", "?")
            detail = ", ".join(
                f"{k}={v}" for k, v in sorted(rep.payload.items()) if k != "suites"
            )
            print(f"[{rep.status:>6}] {cmd} {detail}")
            for name, info in sorted(rep.payload.get("suites", {}).items()):
                inner = ", ".join(f"{k}={v}" for k, v in sorted(info.items()))
                print(f"         suite {name}: {inner}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE_ERROR if e.code not in (0,) else 0
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        if args.command == "run":
            doc = load(_read_source(args.document))
        else:
            doc = load(_read_source(args.doc)) if args.doc else builtin_document()
            doc.tasks = [_task_from_args(args)]
    except (OSError, WorkbenchError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    trials = args.trials if args.trials is not None else 200
    reports = run(doc, seed=seed, bound=args.bound, cap=args.cap, trials=trials)
    _print_reports(reports, args.output)
    return exit_code(reports)


if __name__ == "__main__":
    sys.exit(main())

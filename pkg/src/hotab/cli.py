"""Command-line refuter: parse a problem file, search, report a verdict.

Exit codes: 10 satisfiable, 20 unsatisfiable, 30 unknown, 2 bad input,
1 internal error.  The first stdout line is always sat/unsat/unknown
(except under --fragment-check and --check-proof, which have their own
output).  Diagnostics and notices go to stderr.
"""

from __future__ import annotations

import argparse
import sys

from .fragments import FragmentViolation, classify_branch, decide
from .problems import (
    ParseError,
    Problem,
    parse,
    parse_proof,
    serialize_problem,
    serialize_proof,
)
from .rules import EAGER_RULES, EFO_RULES, STT_RULES
from .search import Refuted, Satisfiable, SearchConfig, Unknown, check_proof, refute
from .semantics import DEFAULT_MAX_TABLE, show_model

__all__ = ["main", "Problem", "parse"]

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_UNKNOWN = 30
EXIT_INPUT = 2
EXIT_INTERNAL = 1


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hotab",
        description="refutation search for higher-order tableau problems",
    )
    ap.add_argument("path", help="problem file, or - for stdin")
    ap.add_argument(
        "--mode",
        choices=("auto", "stt", "efo"),
        default="auto",
        help="calculus to use (default: route by input shape)",
    )
    ap.add_argument(
        "--fragment-check",
        action="store_true",
        help="report which decidable fragments the input falls in, then exit",
    )
    ap.add_argument("--max-nodes", type=int, default=100_000, metavar="N")
    ap.add_argument("--timeout", type=float, default=10.0, metavar="SECONDS")
    ap.add_argument(
        "--fuel-schedule",
        default="1,2,3,4",
        metavar="A,B,...",
        help="instantiation depths for iterative deepening (default 1,2,3,4)",
    )
    ap.add_argument(
        "--eager-close",
        action="store_true",
        help="close branches on complementary or reflexive members immediately",
    )
    ap.add_argument("--proof-out", metavar="PATH", help="write the proof here")
    ap.add_argument("--model-out", metavar="PATH", help="write the model here")
    ap.add_argument(
        "--check-proof",
        metavar="PATH",
        help="verify a previously written proof against the problem",
    )
    ap.add_argument(
        "--max-domain",
        type=int,
        default=None,
        metavar="N",
        help="cap on interpretation table sizes during model extraction",
    )
    return ap


def _read_problem(path: str) -> Problem:
    if path == "-":
        return parse(sys.stdin.read())
    with open(path, encoding="utf-8") as f:
        return parse(f.read())


def _parse_schedule(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise ValueError(f"bad fuel schedule {text!r}: expected integers") from None


def _run_check_proof(problem: Problem, path: str) -> int:
    with open(path, encoding="utf-8") as f:
        proof = parse_proof(f.read(), problem)
    rules = set(proof.rule_counts())
    eager = any(r.value in rules for r in EAGER_RULES)
    core = {r for r in rules} - {r.value for r in EAGER_RULES}
    if core <= {r.value for r in EFO_RULES}:
        calculus = "efo"
    elif core <= {r.value for r in STT_RULES}:
        calculus = "stt"
    else:
        calculus = "auto"
    if check_proof(problem.branch(), proof, calculus=calculus, eager=eager):
        print("proof ok")
        return 0
    print("proof does not check", file=sys.stderr)
    return EXIT_INTERNAL


def _write(path: str | None, text: str) -> None:
    if path is not None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text if text.endswith("\n") else text + "\n")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        problem = _read_problem(args.path)
        for note in problem.notices:
            print(note, file=sys.stderr)
        if args.check_proof is not None:
            return _run_check_proof(problem, args.check_proof)
        branch = problem.branch()
        report = classify_branch(branch)
        if args.fragment_check:
            print(report.describe())
            return 0
        max_table = (
            DEFAULT_MAX_TABLE if args.max_domain is None else args.max_domain
        )
        schedule = _parse_schedule(args.fuel_schedule)
        if args.mode == "auto" and report.decidable():
            verdict = decide(
                branch, max_table=max_table, eager_close=args.eager_close
            )
        else:
            cfg = SearchConfig(
                calculus=args.mode,
                fuel_schedule=schedule,
                max_nodes=args.max_nodes,
                timeout=args.timeout,
                eager_close=args.eager_close,
                max_table=max_table,
            )
            verdict = refute(branch, cfg)
    except (ParseError, FragmentViolation, OSError, ValueError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as ex:  # pragma: no cover - defensive
        print(f"internal error: {type(ex).__name__}: {ex}", file=sys.stderr)
        return EXIT_INTERNAL

    if isinstance(verdict, Refuted):
        print("unsat")
        counts = ", ".join(
            f"{r}: {n}" for r, n in sorted(verdict.proof.rule_counts().items())
        )
        print(f"calculus: {verdict.calculus}", file=sys.stderr)
        print(f"proof size {verdict.proof.size()} ({counts})", file=sys.stderr)
        _write(args.proof_out, serialize_proof(verdict.proof))
        return EXIT_UNSAT
    if isinstance(verdict, Satisfiable):
        print("sat")
        text = show_model(verdict.model)
        print(text, end="" if text.endswith("\n") else "\n")
        _write(args.model_out, text)
        return EXIT_SAT
    assert isinstance(verdict, Unknown)
    print("unknown")
    print(verdict.reason, file=sys.stderr)
    return EXIT_UNKNOWN


if __name__ == "__main__":
    sys.exit(main())

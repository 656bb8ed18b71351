"""Command-line entry point: tabulate ballot files and compute margins.

Reports go to standard output (JSON by default, ``--format text`` for a
human-readable digest); diagnostics go to standard error with a nonzero exit
status.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .distance import DistanceCache, MODES
from .election import BallotFormatError, Election, parse_election
from .search import (
    ALGORITHMS,
    MarginReport,
    SCHEMA_VERSION,
    compute_margin,
    exhaustive_margin,
    mrsw_baseline,
)
from .tabulate import TIE_POLICIES, TabulationResult, last_round_margin, last_round_margin_add, run_irv


@dataclass(frozen=True)
class RunConfig:
    """Everything the ``compute`` command needs."""

    ballots: Path
    mode: str = "modify"
    algorithm: str = "margin"
    bound: str = "lb2"
    cap: int | None = None
    tie_policy: str = "lexicographic"
    output_format: str = "json"
    threads: int = 1
    dump_lp: Path | None = None


def _load(path: Path) -> Election:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise BallotFormatError(f"cannot read {path}: {exc}") from exc
    return parse_election(text)


def _margin_text(report: MarginReport) -> str:
    lines = [
        f"winner: {report.winner}",
        f"elimination order: {','.join(report.elimination_order)}",
        f"margin ({report.mode}): {report.margin}",
        f"last-round margin: {report.lrm}",
        f"capped: {str(report.capped).lower()}",
        f"tie caveat: {str(report.tie_caveat).lower()}",
        f"witness order: {','.join(report.witness_order) if report.witness_order else '-'}",
        f"nodes scored: {report.stats.nodes_scored}",
        f"lps solved: {report.stats.lps_solved}",
        f"elapsed ms: {report.stats.elapsed_ms:.3f}",
    ]
    return "\n".join(lines)


def run(config: RunConfig, out=None, err=None) -> int:
    """Execute a margin computation; returns the process exit status."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        election = _load(config.ballots)
        distance = DistanceCache(
            election, config.mode, dump_dir=config.dump_lp
        )
        if config.algorithm == "margin":
            report = compute_margin(
                election,
                mode=config.mode,
                rule=config.bound,
                cap=config.cap,
                tie_policy=config.tie_policy,
                distance=distance,
                threads=config.threads,
            )
        elif config.algorithm == "mrsw":
            report = mrsw_baseline(
                election, mode=config.mode, tie_policy=config.tie_policy, distance=distance
            )
        elif config.algorithm == "exhaustive":
            report = exhaustive_margin(
                election, mode=config.mode, tie_policy=config.tie_policy, distance=distance
            )
        else:
            raise ValueError(f"unknown algorithm {config.algorithm!r}")
    except (BallotFormatError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 1
    if config.output_format == "json":
        print(report.to_json(indent=2), file=out)
    else:
        print(_margin_text(report), file=out)
    return 0


def tabulation_report(election: Election, result: TabulationResult) -> dict:
    rounds = [
        {election.names[c]: t for c, t in sorted(tallies.items())}
        for tallies in result.round_tallies
    ]
    report = {
        "schema": SCHEMA_VERSION,
        "kind": "tabulation",
        "winner": election.names[result.winner],
        "elimination_order": [election.names[c] for c in result.elimination_order],
        "rounds": rounds,
        "exhausted": list(result.exhausted),
        "tie_events": [
            [rnd, sorted(election.names[c] for c in tied)] for rnd, tied in result.tie_events
        ],
    }
    if election.num_candidates >= 2:
        report["lrm"] = last_round_margin(election)
        report["lrm_add"] = last_round_margin_add(election)
    return report


def _tabulation_text(report: dict) -> str:
    lines = [f"winner: {report['winner']}"]
    lines.append(f"elimination order: {','.join(report['elimination_order'])}")
    for i, tallies in enumerate(report["rounds"], start=1):
        body = ", ".join(f"{name}={count}" for name, count in tallies.items())
        lines.append(f"round {i}: {body} (exhausted {report['exhausted'][i - 1]})")
    for rnd, tied in report["tie_events"]:
        lines.append(f"tie in round {rnd}: {','.join(tied)}")
    if "lrm" in report:
        lines.append(f"last-round margin: {report['lrm']}")
        lines.append(f"last-round margin (add/delete): {report['lrm_add']}")
    return "\n".join(lines)


def tabulate(ballots: Path, tie_policy: str = "lexicographic",
             output_format: str = "json", out=None, err=None) -> int:
    """Execute a tabulation; returns the process exit status."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        election = _load(ballots)
        result = run_irv(election, tie_policy)
    except (BallotFormatError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 1
    report = tabulation_report(election, result)
    if output_format == "json":
        print(json.dumps(report, indent=2), file=out)
    else:
        print(_tabulation_text(report), file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irv-margin",
        description="Tabulate IRV ballot files and compute exact margins of victory.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", help="compute a margin of victory")
    compute.add_argument("--ballots", required=True, type=Path, help="ballot file to read")
    compute.add_argument("--mode", choices=MODES, default="modify",
                         help="manipulation mode (default: modify)")
    compute.add_argument("--algorithm", choices=ALGORITHMS, default="margin",
                         help="search engine (default: margin)")
    compute.add_argument("--bound", choices=("lb1", "lb2"), default="lb2",
                         help="pruning rule for the margin engine (default: lb2)")
    compute.add_argument("--cap", type=int, default=None,
                         help="stop caring above this manipulation size")
    compute.add_argument("--tie-policy", choices=TIE_POLICIES, default="lexicographic")
    compute.add_argument("--format", choices=("json", "text"), default="json",
                         dest="output_format")
    compute.add_argument("--threads", type=int, default=1,
                         help="worker threads for the margin engine")
    compute.add_argument("--dump-lp", type=Path, default=None, metavar="DIR",
                         help="write every distance program to DIR in LP format")

    tab = sub.add_parser("tabulate", help="run the IRV count and report rounds")
    tab.add_argument("--ballots", required=True, type=Path)
    tab.add_argument("--tie-policy", choices=TIE_POLICIES, default="lexicographic")
    tab.add_argument("--format", choices=("json", "text"), default="json",
                     dest="output_format")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "compute":
        config = RunConfig(
            ballots=args.ballots,
            mode=args.mode,
            algorithm=args.algorithm,
            bound=args.bound,
            cap=args.cap,
            tie_policy=args.tie_policy,
            output_format=args.output_format,
            threads=args.threads,
            dump_lp=args.dump_lp,
        )
        return run(config)
    return tabulate(args.ballots, args.tie_policy, args.output_format)


if __name__ == "__main__":
    sys.exit(main())

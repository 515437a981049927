"""Command-line entry point.

Exit codes: 0 ok, 1 config error, 2 runtime error, 3 ledger-audit failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .ledger import LedgerError, parse_ledger_lines
from .metrics import compute_metrics
from .scenario import ConfigError, parse_scenario, read_event_log, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdgsim",
        description="Deterministic volunteer-grid simulator with trust-based "
                    "work distribution")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("--scenario", required=True, help="scenario file path")
    p_run.add_argument("--seed", type=int, help="override the scenario seed")
    p_run.add_argument("--out", help="output directory for reports")
    p_run.add_argument("--mode", choices=("centralized", "trust"),
                       help="override the scenario mode")
    p_run.add_argument("--strategy", choices=("drds", "dods", "dgds", "random"),
                       help="override the distribution strategy")
    p_run.add_argument("--ticks", type=int, help="override horizon_ticks")

    p_verify = sub.add_parser("verify-ledger", help="audit an exported ledger file")
    p_verify.add_argument("ledger", help="ledger.txt path")

    p_replay = sub.add_parser("replay", help="recompute metrics from an event log")
    p_replay.add_argument("--log", required=True, help="events.jsonl path")
    return parser


def cmd_run(args) -> int:
    try:
        cfg = parse_scenario(args.scenario)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 1
    if args.seed is not None:
        cfg.seed = args.seed
    if args.mode is not None:
        cfg.mode = args.mode
    if args.strategy is not None:
        cfg.strategy = args.strategy
    if args.ticks is not None:
        cfg.horizon_ticks = args.ticks
    try:
        _, report, _ = run(cfg, out_dir=args.out)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3 if "ledger" in str(exc) else 2
    for metric, value in report.scalar_rows():
        print(f"{metric},{value}")
    return 0


def cmd_verify_ledger(args) -> int:
    path = Path(args.ledger)
    if not path.exists():
        print(f"config error: no such file {path}", file=sys.stderr)
        return 1
    try:
        ledger = parse_ledger_lines(path.read_text(encoding="utf-8").split("\n"))
    except (LedgerError, ValueError) as exc:
        print(f"ledger parse error: {exc}", file=sys.stderr)
        return 3
    bad = ledger.verify_chain()
    if bad is not None:
        print(f"ledger audit FAILED at block {bad}", file=sys.stderr)
        return 3
    print(f"ok: {len(ledger)} blocks, {ledger.total_committed()} millicredits committed")
    return 0


def cmd_replay(args) -> int:
    path = Path(args.log)
    if not path.exists():
        print(f"config error: no such file {path}", file=sys.stderr)
        return 1
    try:
        header, events = read_event_log(path)
        report = compute_metrics(header, events)
    except Exception as exc:  # malformed log
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    for metric, value in report.scalar_rows():
        print(f"{metric},{value}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "verify-ledger":
        return cmd_verify_ledger(args)
    return cmd_replay(args)


if __name__ == "__main__":
    sys.exit(main())

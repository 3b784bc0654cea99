"""Batch command line: ``fixlimits run FILE``, ``fixlimits suite DIR``, ``fixlimits schema``.

Exit codes: 0 when every check passes, 1 when any check fails (including
infeasible or capacity outcomes), 2 on input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import scenario as sc

SCENARIO_SUFFIXES = (".yaml", ".yml")


def _options(args) -> sc.Options:
    return sc.Options(fuel=args.fuel, seed=args.seed, bound=args.bound, raw_relation=args.raw_relation)


def _text(report: dict) -> str:
    if "scenarios" in report:
        lines = [_text(r) for r in report["scenarios"]]
        c = report["counts"]
        lines.append(f"suite {report['suite']}: {report['status'].upper()} "
                     f"({c['pass']} passed, {c['fail']} failed)")
        return "\n".join(lines)
    lines = [f"{report['scenario']} [{report['kind']}] {report['status'].upper()}"]
    for c in report["checks"]:
        extra = ""
        if "mismatches" in c["data"]:
            extra = " mismatches: " + json.dumps(c["data"]["mismatches"], sort_keys=True)
        lines.append(f"  {c['status']:<10} {c['name']}{extra}")
    return "\n".join(lines)


def _emit(report: dict, fmt: str) -> None:
    sys.stdout.write((sc.dumps(report) if fmt == "json" else _text(report)) + "\n")


def run_file(path, opts: sc.Options) -> dict:
    return sc.run_scenario(sc.load_scenario(path), opts)


def run_directory(directory, opts: sc.Options, jobs: int = 1) -> dict:
    d = Path(directory)
    if not d.is_dir():
        raise sc.ScenarioError(f"{d}: not a directory")
    files = sorted(p for p in d.iterdir() if p.suffix in SCENARIO_SUFFIXES and p.is_file())
    if not files:
        raise sc.ScenarioError(f"{d}: no scenario files")
    docs = [sc.load_scenario(p) for p in files]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(lambda doc: sc.run_scenario(doc, opts), docs))
    else:
        reports = [sc.run_scenario(doc, opts) for doc in docs]
    passed = sum(r["status"] == "pass" for r in reports)
    return {
        "schema_version": sc.SCHEMA_VERSION,
        "suite": d.name,
        "scenarios": reports,
        "counts": {"pass": passed, "fail": len(reports) - passed},
        "failed": [r["scenario"] for r in reports if r["status"] != "pass"],
        "status": "pass" if passed == len(reports) else "fail",
        "timing": {"seconds": round(sum(r["timing"]["seconds"] for r in reports), 6)},
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fixlimits", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, help="iteration budget override")
    common.add_argument("--seed", type=int, help="seed override for randomized checks")
    common.add_argument("--bound", type=int, help="enumeration cap override")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--raw-relation", action="store_true",
                        help="allow non-GL frames in gl scenarios (counterexample demos)")
    common.add_argument("--no-timing", action="store_true", help="omit timing fields from the report")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", parents=[common], help="run one scenario file")
    p_run.add_argument("file")
    p_suite = sub.add_parser("suite", parents=[common], help="run every scenario in a directory")
    p_suite.add_argument("directory")
    p_suite.add_argument("--jobs", type=int, default=1)
    sub.add_parser("schema", help="print the scenario JSON schema")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "schema":
        sys.stdout.write(json.dumps(sc.SCENARIO_SCHEMA, indent=2) + "\n")
        return 0
    if args.fuel is not None and args.fuel < 1:
        sys.stderr.write("error: --fuel must be at least 1\n")
        return 2
    opts = _options(args)
    try:
        if args.command == "run":
            report = run_file(args.file, opts)
        else:
            report = run_directory(args.directory, opts, max(1, args.jobs))
    except sc.ScenarioError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    if args.no_timing:
        report = sc.strip_timing(report)
    _emit(report, args.format)
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())

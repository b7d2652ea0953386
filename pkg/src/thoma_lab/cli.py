"""Command-line runner: ``thoma-lab character|verify|report``.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 resource cap exceeded, 4 input/output error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import SUITES, ExperimentConfig
from .errors import ConfigError, ContractError, ResourceLimitError
from .suites import VerificationReport, run_suite
from .symgroup import cycle_type, symmetric_group
from .tensor_model import ModelSpace, represent, trace
from .thoma import character

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE, EXIT_IO = 0, 1, 2, 3, 4

CSV_FIELDS = ("cycle_type", "partition", "class_size", "formula", "model", "agree")


class _IOFailure(Exception):
    pass


def cmd_character(config: ExperimentConfig, n: int | None = None) -> dict:
    """Character values on every class of ``S_n`` from the formula and from the tensor model."""
    n = n if n is not None else min(config.enumeration_bound, config.slot_count)
    if n < 1:
        raise ConfigError("n must be positive")
    space = ModelSpace.from_params(config.params, n, config.zero_labels)
    rows: dict = {}
    for p in symmetric_group(n, config.enumeration_bound):
        ct = cycle_type(p)
        formula, model = character(config.params, p), trace(space, represent(space, p))
        row = rows.setdefault(ct, {"formula": formula, "model": model, "agree": True, "count": 0})
        row["count"] += 1
        row["agree"] &= formula == model == row["formula"] == row["model"]
    table = [
        {
            "cycle_type": str(ct),
            "partition": " ".join(map(str, ct.partition(n))),
            "class_size": row["count"],
            "formula": str(row["formula"]),
            "model": str(row["model"]),
            "agree": row["agree"],
        }
        for ct, row in sorted(rows.items(), key=lambda kv: kv[0].partition(n), reverse=True)
    ]
    return {
        "command": "character",
        "n": n,
        "params": config.params.to_json(),
        "status": "pass" if all(r["agree"] for r in table) else "fail",
        "rows": table,
    }


def cmd_verify(config: ExperimentConfig, suite: str) -> VerificationReport:
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {list(SUITES)}")
    return run_suite(suite, config)


def _run_many(config: ExperimentConfig, suites: Sequence[str]) -> list[VerificationReport]:
    if config.jobs > 1 and len(suites) > 1:
        with ProcessPoolExecutor(max_workers=min(config.jobs, len(suites))) as pool:
            return list(pool.map(cmd_verify, [config] * len(suites), suites))
    return [cmd_verify(config, s) for s in suites]


def cmd_report(config: ExperimentConfig, suites: Sequence[str] | None = None,
               inputs: Sequence[str] = (), timing: bool = False) -> dict:
    """Merge prior suite outputs with suites run now into one document."""
    merged: list[dict] = []
    for path in inputs:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise _IOFailure(f"cannot read report {path}: {exc}") from exc
        merged.extend(data["suites"] if "suites" in data else [data])
    names = list(config.suites if suites is None else suites)
    merged.extend(r.to_json(timing) for r in _run_many(config, names))
    merged.sort(key=lambda r: (SUITES.index(r["suite"]) if r["suite"] in SUITES else len(SUITES), r["suite"]))
    return {
        "command": "report",
        "seed": config.seed,
        "params": config.params.to_json(),
        "status": "pass" if all(r["status"] == "pass" for r in merged) else "fail",
        "record_count": sum(r["record_count"] for r in merged),
        "suites": merged,
    }


def character_csv(table: dict) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in table["rows"]:
        writer.writerow({k: str(row[k]).lower() if k == "agree" else row[k] for k in CSV_FIELDS})
    return buf.getvalue()


def dumps(document: dict) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thoma-lab", description="Exact checks for characters of S_infinity.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config (defaults are used without one)")
    common.add_argument("--seed", type=int, help="override the recorded 64-bit seed")
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--jobs", type=int, help="worker processes for independent suites")
    common.add_argument("--timing", action="store_true", help="include wall times (output no longer reproducible)")

    ch = sub.add_parser("character", parents=[common], help="character table from formula and model")
    ch.add_argument("--n", type=int, help="symmetric group S_n to tabulate")
    ch.add_argument("--csv", help="also write the table as CSV")

    ver = sub.add_parser("verify", parents=[common], help="run one verification suite")
    ver.add_argument("--suite", required=True, choices=SUITES)

    rep = sub.add_parser("report", parents=[common], help="run or merge suites into one report")
    rep.add_argument("--suite", action="append", choices=SUITES, help="restrict to these suites (repeatable)")
    rep.add_argument("--no-suites", action="store_true", help="run nothing; only merge --input files")
    rep.add_argument("--input", action="append", default=[], help="previously written suite or report JSON")
    rep.add_argument("--csv", help="also write the S_n character table as CSV")
    return parser


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    return config.with_overrides(seed=args.seed, out=args.out, jobs=args.jobs, csv=getattr(args, "csv", None))


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args)
        if args.command == "character":
            table = cmd_character(config, args.n)
            _write(dumps(table), config.out)
            if config.csv:
                _write(character_csv(table), config.csv)
            return EXIT_OK if table["status"] == "pass" else EXIT_FAIL
        if args.command == "verify":
            report = cmd_verify(config, args.suite)
            _write(dumps(report.to_json(args.timing)), config.out)
            return EXIT_OK if report.passed else EXIT_FAIL
        suites = [] if args.no_suites else args.suite
        document = cmd_report(config, suites, args.input, args.timing)
        _write(dumps(document), config.out)
        if config.csv:
            _write(character_csv(cmd_character(config)), config.csv)
        return EXIT_OK if document["status"] == "pass" else EXIT_FAIL
    except (ConfigError, ContractError) as exc:
        print(f"thoma-lab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        print(f"thoma-lab: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except _IOFailure as exc:
        print(f"thoma-lab: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"thoma-lab: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

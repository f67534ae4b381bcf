"""``crosswind`` command: validate and run scenario files."""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigError, CrosswindError, SimulationCrash
from .harness import SCHEMA_VERSIONS, format_value, run_scenario
from .scenario import load_scenario

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_CONFIG = 2
EXIT_CRASH = 3


def write_table(path: Path, table):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_value(v) for v in row])


def write_outputs(out_dir: Path, prefix: str, tables: dict, kind: str, scenario_bytes: bytes) -> list:
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {}
    for name, table in tables.items():
        fname = f"{prefix}_{name}.csv"
        write_table(out_dir / fname, table)
        files[fname] = {"table": name, "schema_version": SCHEMA_VERSIONS[name], "columns": list(table.columns),
                        "rows": len(table.rows)}
    manifest = {
        "kind": kind,
        "package_version": __version__,
        "scenario_sha256": hashlib.sha256(scenario_bytes).hexdigest(),
        "files": files,
    }
    with open(out_dir / f"{prefix}_manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sorted(files)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crosswind", description="Crosswind wing experiment runner.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario and write CSV tables")
    run.add_argument("scenario", type=Path)
    run.add_argument("--out-dir", type=Path, default=Path("."), help="directory for CSV output (default: .)")
    run.add_argument("--threads", type=int, default=1, help="worker threads for batch studies")
    run.add_argument("--seed-override", type=int, default=None, help="replace the scenario's wind and sensor seeds")
    val = sub.add_parser("validate", help="parse and validate a scenario without running it")
    val.add_argument("scenario", type=Path)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
        if args.command == "validate":
            print(f"{args.scenario}: ok ({scenario.kind})")
            return EXIT_OK
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        if args.seed_override is not None:
            if args.seed_override < 0:
                raise ConfigError("--seed-override must be non-negative")
            scenario = scenario.with_seed(args.seed_override)
        tables = run_scenario(scenario, args.threads)
        files = write_outputs(args.out_dir, scenario.output, tables, scenario.kind, args.scenario.read_bytes())
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationCrash as exc:
        print(f"simulation crash: {exc}", file=sys.stderr)
        return EXIT_CRASH
    except (CrosswindError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER
    for f in files:
        print(args.out_dir / f)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

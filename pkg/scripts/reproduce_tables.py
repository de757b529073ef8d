#!/usr/bin/env python3
"""
reproduce_tables.py

Run the simulation scenarios shipped in packages/hstobit-engine/examples/
and collect their formatted tables.

Each scenario file ``table<k>_*.json`` is run through ``hstobit simulate``
into ``<out>/<scenario>/``; the per-scenario ``table.csv`` files of one
table are then stacked into ``<out>/table<k>.csv``.

Usage:
  uv run python scripts/reproduce_tables.py --out results/ --tables 1 4 --threads 8
  uv run python scripts/reproduce_tables.py --out results/ --reps 10   # quick look
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

import pandas as pd
from hstobit_engine.__main__ import main as hstobit_main

EXAMPLES = Path(__file__).resolve().parent.parent / "packages" / "hstobit-engine" / "examples"


def scenario_files(table: int) -> list[Path]:
    return sorted(EXAMPLES.glob(f"table{table}_*.json"))


def with_reps(path: Path, reps: int, workdir: Path) -> Path:
    """Copy of a scenario file with ``n_reps`` replaced."""
    scenario = json.loads(path.read_text(encoding="utf-8"))
    scenario["n_reps"] = reps
    workdir.mkdir(parents=True, exist_ok=True)
    patched = workdir / path.name
    patched.write_text(json.dumps(scenario, indent=2), encoding="utf-8")
    return patched


def run_table(table: int, out: Path, threads: int, seed: Optional[int], reps: Optional[int]) -> Optional[Path]:
    files = scenario_files(table)
    if not files:
        print(f"No scenario files for table {table}", file=sys.stderr)
        return None
    frames = []
    for path in files:
        source = with_reps(path, reps, out / "scenarios") if reps is not None else path
        target = out / path.stem
        argv = ["simulate", str(source), "--threads", str(threads), "-o", str(target)]
        if seed is not None:
            argv += ["--seed", str(seed)]
        code = hstobit_main(argv)
        if code != 0:
            print(f"{path.name}: simulate exited with {code}", file=sys.stderr)
            continue
        frames.append(pd.read_csv(target / "table.csv"))
    if not frames:
        return None
    combined = out / f"table{table}.csv"
    pd.concat(frames, ignore_index=True).to_csv(combined, index=False)
    return combined


def main():
    parser = argparse.ArgumentParser(description="Reproduce the simulation tables from the shipped scenario files")
    parser.add_argument("--out", type=Path, required=True, help="Output directory")
    parser.add_argument("--tables", type=int, nargs="+", default=[1, 2, 3, 4, 5], help="Tables to run (default all)")
    parser.add_argument("--threads", type=int, default=1, help="Worker processes per scenario")
    parser.add_argument("--reps", type=int, help="Override the replicate count of every scenario")
    parser.add_argument("--seed", type=int, help="Override the base seed of every scenario")
    args = parser.parse_args()

    failed = 0
    for table in args.tables:
        combined = run_table(table, args.out, args.threads, args.seed, args.reps)
        if combined is None:
            failed += 1
        else:
            print(f"table {table}: {combined}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

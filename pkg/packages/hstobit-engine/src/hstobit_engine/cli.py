"""Argument parsing and config resolution for the ``hstobit`` command.

Usage:
    hstobit fit data.csv --config fit.json --iters 2000 -o out/
    hstobit simulate examples/table1_p100_n80_s10_rho0.json --threads 8 -o out/
    hstobit predict out/summary.csv newdata.csv --censor-at 0 -o pred/
    hstobit diagnose out/samples.csv --indices 0,1,2 --max-lag 40 -o diag/
    hstobit evaluate data.csv --splits 100 --train-fraction 0.7 -o eval/
    hstobit replay out/manifest.json -o again/

Resolved configs follow the precedence (lowest to highest):
1. Built-in defaults
2. The config file (``--config`` or the scenario file)
3. Command-line flags
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path
from typing import Any

from hstobit_core.config import EvaluateConfig, FitConfig, Study
from hstobit_core.errors import ConfigError, DomainError
from hstobit_core.io import load_config


def _index_list(raw: str) -> list[int]:
    try:
        return [int(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"Expected comma-separated integers, got {raw!r}") from exc


def _add_chain_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("sampler")
    group.add_argument("--seed", type=int, help="Random seed (base seed for simulate)")
    group.add_argument("--alpha", type=float, help="Tempering exponent in (0, 1] (default 0.99)")
    group.add_argument("--iters", type=int, help="Gibbs sweeps per chain (default 1200)")
    group.add_argument("--burnin", type=int, help="Sweeps discarded as burn-in (default 500)")
    group.add_argument("--thin", type=int, help="Keep every k-th post-burn-in draw (default 1)")
    group.add_argument("--fix-sigma2", type=float, dest="fix_sigma2", help="Hold sigma2 fixed at this value")
    group.add_argument("--sampler", choices=["auto", "direct", "auxiliary"], help="Beta update algorithm")


def _add_data_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("data")
    group.add_argument("--censor-at", type=float, dest="censor_at", help="Left-censoring threshold c (default 0)")
    group.add_argument(
        "--standardize",
        action="store_true",
        default=None,
        help="Scale predictor columns to unit SD before fitting",
    )


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="hstobit",
        description="Sparse Tobit regression with a tempered Horseshoe Gibbs sampler",
    )
    parser.add_argument("--log-level", default="INFO", help="Logging level (default INFO)")
    parser.add_argument("--log-dir", help="Also write rotating log files to this directory")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="Fit one CSV dataset")
    fit.add_argument("data_csv", type=Path)
    fit.add_argument("--config", type=Path, help="FitConfig JSON file")
    fit.add_argument("--response", help="Response column name (default y)")
    fit.add_argument(
        "--store-hyperparams",
        action="store_true",
        default=None,
        dest="store_hyperparams",
        help="Also write the local-scale draws to lambda2.csv",
    )
    fit.add_argument("-o", "--out", type=Path, required=True, dest="output_dir")
    _add_data_flags(fit)
    _add_chain_flags(fit)

    simulate = sub.add_parser("simulate", help="Run a simulation scenario or study file")
    simulate.add_argument("scenario_file", type=Path)
    simulate.add_argument("--threads", type=int, help="Worker processes (default $HSTOBIT_THREADS or 1)")
    simulate.add_argument("-o", "--out", type=Path, required=True, dest="output_dir")
    _add_data_flags(simulate)
    _add_chain_flags(simulate)

    predict = sub.add_parser("predict", help="Censored predictions from a posterior summary")
    predict.add_argument("summary_csv", type=Path)
    predict.add_argument("newdata_csv", type=Path)
    predict.add_argument("--censor-at", type=float, default=0.0, dest="censor_at")
    predict.add_argument("-o", "--out", type=Path, required=True, dest="output_dir")

    diagnose = sub.add_parser("diagnose", help="Trace, ACF and ESS tables from samples.csv")
    diagnose.add_argument("samples_csv", type=Path)
    diagnose.add_argument("--indices", type=_index_list, required=True, help="0-based coefficients, e.g. 0,1,2")
    diagnose.add_argument("--max-lag", type=int, default=40, dest="max_lag")
    diagnose.add_argument("-o", "--out", type=Path, required=True, dest="output_dir")

    evaluate = sub.add_parser("evaluate", help="Repeated random train/test splits of one CSV dataset")
    evaluate.add_argument("data_csv", type=Path)
    evaluate.add_argument("--config", type=Path, help="EvaluateConfig JSON file")
    evaluate.add_argument("--response", help="Response column name (default y)")
    evaluate.add_argument("--train-fraction", type=float, dest="train_fraction")
    evaluate.add_argument("--splits", type=int, dest="n_splits")
    evaluate.add_argument("--split-seed", type=int, dest="split_seed")
    evaluate.add_argument("-o", "--out", type=Path, required=True, dest="output_dir")
    _add_data_flags(evaluate)
    _add_chain_flags(evaluate)

    replay = sub.add_parser("replay", help="Re-run the command recorded in a manifest")
    replay.add_argument("manifest", type=Path)
    replay.add_argument("-o", "--out", type=Path, dest="output_dir")

    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# Config resolution
# ---------------------------------------------------------------------------


def merge_overrides(base: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    """Recursively overlay ``overrides`` on ``base``; neither is modified."""
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_overrides(merged[key], value)
        else:
            merged[key] = value
    return merged


def _set(target: dict[str, Any], key: str, value: Any) -> None:
    if value is not None:
        target[key] = value


def chain_overrides(args: argparse.Namespace, include_seed: bool = True) -> dict[str, Any]:
    """ChainConfig fields set on the command line, nested like the config file."""
    model: dict[str, Any] = {}
    _set(model, "alpha", getattr(args, "alpha", None))
    _set(model, "sigma2_fixed", getattr(args, "fix_sigma2", None))
    chain: dict[str, Any] = {}
    if include_seed:
        _set(chain, "seed", getattr(args, "seed", None))
    _set(chain, "n_iter", getattr(args, "iters", None))
    _set(chain, "burn_in", getattr(args, "burnin", None))
    _set(chain, "thin", getattr(args, "thin", None))
    _set(chain, "sampler", getattr(args, "sampler", None))
    _set(chain, "store_hyperparams", getattr(args, "store_hyperparams", None))
    if model:
        chain["model"] = model
    return chain


def read_json_object(path: Path) -> dict[str, Any]:
    try:
        payload = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"Cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"Config file {path} must contain a JSON object")
    return payload


def _data_overrides(args: argparse.Namespace) -> dict[str, Any]:
    out: dict[str, Any] = {}
    _set(out, "c", getattr(args, "censor_at", None))
    _set(out, "standardize", getattr(args, "standardize", None))
    _set(out, "response", getattr(args, "response", None))
    return out


def resolve_fit_config(args: argparse.Namespace) -> FitConfig:
    base = read_json_object(args.config) if args.config else {}
    overrides = _data_overrides(args)
    chain = chain_overrides(args)
    if chain:
        overrides["chain"] = chain
    return load_config(FitConfig, merge_overrides(base, overrides))


def resolve_evaluate_config(args: argparse.Namespace) -> EvaluateConfig:
    base = read_json_object(args.config) if args.config else {}
    overrides = _data_overrides(args)
    _set(overrides, "train_fraction", args.train_fraction)
    _set(overrides, "n_splits", args.n_splits)
    _set(overrides, "split_seed", args.split_seed)
    chain = chain_overrides(args)
    if chain:
        overrides["chain"] = chain
    return load_config(EvaluateConfig, merge_overrides(base, overrides))


def _absolute_methods(scenario: dict[str, Any], base_dir: Path) -> dict[str, Any]:
    methods = scenario.get("methods")
    if not isinstance(methods, list):
        return scenario
    fixed = []
    for method in methods:
        if isinstance(method, dict) and isinstance(method.get("coefficients_csv"), str):
            csv = Path(method["coefficients_csv"])
            method = {**method, "coefficients_csv": str(csv if csv.is_absolute() else base_dir / csv)}
        fixed.append(method)
    return {**scenario, "methods": fixed}


def resolve_study(args: argparse.Namespace) -> Study:
    """A scenario file, or a study file ``{"scenarios": [...]}``, with flags applied to every scenario.

    ``--seed`` sets each scenario's ``base_seed``; coefficient-file paths
    are made absolute relative to the scenario file.
    """
    payload = read_json_object(args.scenario_file)
    scenarios = payload.get("scenarios") if "scenarios" in payload else [payload]
    if not isinstance(scenarios, list):
        raise ConfigError("'scenarios' must be a list")
    if set(payload) - {"scenarios"} and "scenarios" in payload:
        raise ConfigError("Invalid Study", unknown_keys=sorted(set(payload) - {"scenarios"}))
    overrides: dict[str, Any] = {}
    _set(overrides, "c", args.censor_at)
    _set(overrides, "standardize", args.standardize)
    _set(overrides, "base_seed", args.seed)
    chain = chain_overrides(args, include_seed=False)
    if chain:
        overrides["chain"] = chain
    base_dir = args.scenario_file.resolve().parent
    resolved = []
    for scenario in scenarios:
        if not isinstance(scenario, dict):
            raise ConfigError("Every scenario must be a JSON object")
        resolved.append(merge_overrides(_absolute_methods(scenario, base_dir), overrides))
    return load_config(Study, {"scenarios": resolved})


def check_output_dir(path: Path) -> Path:
    if path.exists() and not path.is_dir():
        raise DomainError(f"Output path exists and is not a directory: {path}")
    path.mkdir(parents=True, exist_ok=True)
    return path

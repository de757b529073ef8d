"""hstobit command line: fit, simulate, predict, diagnose, evaluate, replay.

Every command writes its tables plus a ``manifest.json`` recording the
resolved configuration, seed, version and PRNG, from which ``replay``
re-runs it bit-exactly.

Exit codes: 0 success, 2 invalid input (config, schema, ingestion or
domain errors), 3 numerical failure inside a chain.
"""

from __future__ import annotations

import logging
import os
import sys
import time
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from hstobit_core.config import EvaluateConfig, FitConfig, Study
from hstobit_core.errors import ConfigError, DomainError, IngestionError, NumericError, SchemaError
from hstobit_core.io import dump_config, load_config, read_dataset_csv, read_numeric_csv
from hstobit_core.likelihood import predict
from opentelemetry import trace

try:
    from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import OTLPSpanExporter
    from opentelemetry.sdk.resources import Resource
    from opentelemetry.sdk.trace import TracerProvider
    from opentelemetry.sdk.trace.export import BatchSpanProcessor

    _HAS_OTEL_SDK = True
except ImportError:
    _HAS_OTEL_SDK = False

from .chain import PosteriorSamples, posterior_summary, run_chain
from .cli import check_output_dir, parse_args, resolve_evaluate_config, resolve_fit_config, resolve_study
from .diagnostics import (
    LOW_RELATIVE_ESS,
    acf_export,
    effective_sample_size,
    importance_log_weights,
    importance_weight_summary,
    trace_export,
)
from .evaluation import evaluate_splits
from .logging_config import configure_logging
from .output import RunManifest, load_manifest, print_error, print_success, print_system, write_csv, write_manifest
from .simulation import ScenarioResult, resolve_threads, run_study

_log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3


def _init_tracing() -> Any:
    """Export spans over OTLP/gRPC when the SDK is installed and OTEL_ENDPOINT is set."""
    endpoint = os.environ.get("OTEL_ENDPOINT")
    if not _HAS_OTEL_SDK or not endpoint:
        _log.debug("OpenTelemetry export disabled")
        return None
    resource = Resource.create({"service.name": "hstobit"})
    provider = TracerProvider(resource=resource)
    provider.add_span_processor(BatchSpanProcessor(OTLPSpanExporter(endpoint=endpoint, insecure=True)))
    trace.set_tracer_provider(provider)
    _log.info("OpenTelemetry tracing initialized (endpoint=%s)", endpoint)
    return provider


def _finish(manifest: RunManifest, output_dir: Path, files: list[Path]) -> RunManifest:
    manifest.outputs = [f.name for f in files]
    write_manifest(manifest, output_dir)
    return manifest


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_fit(data_csv: Path, cfg: FitConfig, output_dir: Path) -> RunManifest:
    """Fit one dataset; write summary.csv, samples.csv (lambda2.csv on request) and manifest.json."""
    output_dir = check_output_dir(output_dir)
    data = read_dataset_csv(data_csv, cfg.response, cfg.c, cfg.standardize)
    _log.info("Fitting %s: n=%d, p=%d, %.0f%% censored", data_csv, data.n, data.p, 100 * data.censored_fraction)

    samples = run_chain(data, cfg.chain)
    reported = samples.rescaled(data.scales)
    files = [
        write_csv(posterior_summary(reported), output_dir / "summary.csv"),
        write_csv(reported.to_frame(), output_dir / "samples.csv"),
    ]
    if samples.lambda2_draws is not None:
        files.append(write_csv(samples.lambda2_frame(), output_dir / "lambda2.csv"))

    diagnostics: dict[str, Any] = {"sampler_path": samples.sampler_path, "censored_fraction": data.censored_fraction}
    warnings = dict(samples.clamp_counts)
    if data.censored.any() and cfg.chain.model.alpha < 1:
        weights = importance_weight_summary(importance_log_weights(samples, data, cfg.chain.model))
        diagnostics["importance_relative_ess"] = weights.relative_ess
        diagnostics["importance_log_weight_variance"] = weights.log_weight_variance
        if weights.relative_ess < LOW_RELATIVE_ESS:
            warnings["low_importance_ess"] = 1

    manifest = RunManifest(
        command="fit",
        inputs={"data_csv": str(Path(data_csv).resolve())},
        config=dump_config(cfg),
        seed=cfg.chain.seed,
        timings={"chain_seconds": samples.elapsed_seconds},
        warnings=warnings,
        diagnostics=diagnostics,
    )
    return _finish(manifest, output_dir, files)


def _combined(results: list[ScenarioResult], frame: str) -> pd.DataFrame:
    return pd.concat([getattr(r, frame)() for r in results], ignore_index=True)


def cmd_simulate(study: Study, output_dir: Path, threads: int | None = None) -> RunManifest:
    """Run every scenario; write replicates, summary, table and timings CSVs.

    Only ``timings.csv`` and the manifest depend on wall-clock time.
    """
    output_dir = check_output_dir(output_dir)
    workers = resolve_threads(threads)
    start = time.perf_counter()
    results = run_study(study, threads=workers)
    elapsed = time.perf_counter() - start
    for result in results:
        n_failed = len(result.failed)
        print_system(f"{result.scenario.name}: {len(result.records) - n_failed} fits ok, {n_failed} failed")

    files = [
        write_csv(_combined(results, "replicates_frame"), output_dir / "replicates.csv"),
        write_csv(_combined(results, "summary_frame"), output_dir / "summary.csv"),
        write_csv(_combined(results, "table_frame"), output_dir / "table.csv"),
        write_csv(_combined(results, "timings_frame"), output_dir / "timings.csv"),
    ]
    failed = sum(len(r.failed) for r in results)
    manifest = RunManifest(
        command="simulate",
        inputs={"threads": workers},
        config=dump_config(study),
        seed=study.scenarios[0].base_seed,
        timings={"total_seconds": elapsed},
        warnings={"failed_replicates": failed} if failed else {},
    )
    return _finish(manifest, output_dir, files)


def cmd_predict(summary_csv: Path, newdata_csv: Path, c: float, output_dir: Path) -> RunManifest:
    """Predict max(xᵀβ̂, c) with β̂ = the summary's ``mean`` column."""
    output_dir = check_output_dir(output_dir)
    try:
        summary = pd.read_csv(summary_csv)
    except FileNotFoundError as exc:
        raise SchemaError(f"Summary file not found: {summary_csv}") from exc
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise IngestionError(f"Cannot parse summary {summary_csv}: {exc}") from exc
    missing = [col for col in ("coefficient", "mean") if col not in summary.columns]
    if missing:
        raise SchemaError(f"Summary {summary_csv} is missing columns: {', '.join(missing)}")
    names = [str(name) for name in summary["coefficient"]]
    beta_hat = pd.to_numeric(summary["mean"], errors="coerce").to_numpy(dtype=float, na_value=np.nan)
    bad = np.flatnonzero(~np.isfinite(beta_hat))
    if bad.size:
        cell = summary["mean"].iloc[bad[0]]
        raise IngestionError(f"Non-numeric coefficient mean {cell!r}", row=int(bad[0]) + 1, column="mean")
    newdata = read_numeric_csv(newdata_csv)
    absent = [name for name in names if name not in newdata.columns]
    if absent:
        raise SchemaError(f"New data lacks coefficient columns: {', '.join(absent)}")
    predictions = predict(newdata[names].to_numpy(dtype=float), beta_hat, c)
    files = [write_csv(pd.DataFrame({"prediction": predictions}), output_dir / "predictions.csv")]
    manifest = RunManifest(
        command="predict",
        inputs={"summary_csv": str(Path(summary_csv).resolve()), "newdata_csv": str(Path(newdata_csv).resolve())},
        config={"c": c},
    )
    return _finish(manifest, output_dir, files)


def cmd_diagnose(samples_csv: Path, indices: list[int], max_lag: int, output_dir: Path) -> RunManifest:
    """Write trace.csv, acf.csv (long schema) and ess.csv for the chosen coefficients."""
    output_dir = check_output_dir(output_dir)
    samples = PosteriorSamples.from_frame(read_numeric_csv(samples_csv))
    traces = trace_export(samples, indices)
    ess = pd.DataFrame(
        {
            "param_index": indices,
            "ess": [effective_sample_size(samples.beta_draws[:, j]) for j in indices],
        }
    )
    files = [
        write_csv(traces, output_dir / "trace.csv"),
        write_csv(acf_export(samples, indices, max_lag), output_dir / "acf.csv"),
        write_csv(ess, output_dir / "ess.csv"),
    ]
    manifest = RunManifest(
        command="diagnose",
        inputs={"samples_csv": str(Path(samples_csv).resolve())},
        config={"indices": list(indices), "max_lag": max_lag},
    )
    return _finish(manifest, output_dir, files)


def cmd_evaluate(data_csv: Path, cfg: EvaluateConfig, output_dir: Path) -> RunManifest:
    """Random-split evaluation; write splits.csv and summary.csv."""
    output_dir = check_output_dir(output_dir)
    data = read_dataset_csv(data_csv, cfg.response, cfg.c)
    start = time.perf_counter()
    result = evaluate_splits(data, cfg, cfg.train_fraction, cfg.n_splits, cfg.split_seed)
    elapsed = time.perf_counter() - start
    files = [
        write_csv(result.splits, output_dir / "splits.csv"),
        write_csv(result.summary_frame(), output_dir / "summary.csv"),
    ]
    manifest = RunManifest(
        command="evaluate",
        inputs={"data_csv": str(Path(data_csv).resolve())},
        config=dump_config(cfg),
        seed=cfg.split_seed,
        timings={"total_seconds": elapsed},
    )
    return _finish(manifest, output_dir, files)


def replay(manifest_path: Path, output_dir: Path | None = None) -> RunManifest:
    """Re-run the command recorded in a manifest with its resolved config."""
    manifest = load_manifest(manifest_path)
    source = Path(manifest_path)
    out = output_dir or (source if source.is_dir() else source.parent) / "replay"
    inputs, config = manifest.inputs, manifest.config
    _log.info("Replaying '%s' into %s", manifest.command, out)
    try:
        match manifest.command:
            case "fit":
                return cmd_fit(Path(inputs["data_csv"]), load_config(FitConfig, config), out)
            case "simulate":
                return cmd_simulate(load_config(Study, config), out, inputs.get("threads"))
            case "predict":
                return cmd_predict(Path(inputs["summary_csv"]), Path(inputs["newdata_csv"]), config["c"], out)
            case "diagnose":
                return cmd_diagnose(Path(inputs["samples_csv"]), config["indices"], config["max_lag"], out)
            case "evaluate":
                return cmd_evaluate(Path(inputs["data_csv"]), load_config(EvaluateConfig, config), out)
    except KeyError as exc:
        raise ConfigError(f"Manifest for '{manifest.command}' lacks entry {exc}") from exc
    raise ConfigError(f"Manifest records an unknown command: {manifest.command!r}")


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------


def _dispatch(args: Any) -> RunManifest:
    match args.command:
        case "fit":
            return cmd_fit(args.data_csv, resolve_fit_config(args), args.output_dir)
        case "simulate":
            return cmd_simulate(resolve_study(args), args.output_dir, args.threads)
        case "predict":
            return cmd_predict(args.summary_csv, args.newdata_csv, args.censor_at, args.output_dir)
        case "diagnose":
            return cmd_diagnose(args.samples_csv, args.indices, args.max_lag, args.output_dir)
        case "evaluate":
            return cmd_evaluate(args.data_csv, resolve_evaluate_config(args), args.output_dir)
        case "replay":
            return replay(args.manifest, args.output_dir)
    raise ConfigError(f"Unknown command: {args.command}")


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    configure_logging(args.log_level, args.log_dir)
    provider = _init_tracing()
    try:
        manifest = _dispatch(args)
    except NumericError as exc:
        print_error(f"Numerical failure: {exc}")
        return EXIT_NUMERIC
    except (ConfigError, DomainError) as exc:
        print_error(f"{type(exc).__name__}: {exc}")
        return EXIT_INVALID
    finally:
        if provider is not None:
            provider.shutdown()
    print_success(f"{manifest.command}: wrote {', '.join(manifest.outputs)} and manifest.json")
    return EXIT_OK


def main_sync() -> None:
    """Entry point for the console script."""
    sys.exit(main())


if __name__ == "__main__":
    main_sync()

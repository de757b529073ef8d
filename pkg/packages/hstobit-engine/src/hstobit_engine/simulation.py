"""Synthetic Tobit scenarios, the four squared-error metrics and the
replicate harness behind the simulation tables.

Every replicate draws its data from ``RngStream(base_seed).substream(rep, 0)``
and its chain from ``substream(rep, 1)``, so results do not depend on how
replicates are spread over worker processes.
"""

from __future__ import annotations

import logging
import math
import os
import time
from collections.abc import Callable, Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd
from hstobit_core.config import NoiseFamily
from hstobit_core.dataset import TobitDataset
from hstobit_core.errors import DomainError, HstobitError, SchemaError
from hstobit_core.io import read_numeric_csv
from hstobit_core.likelihood import predict
from hstobit_core.rng import RngStream
from opentelemetry import trace

from .chain import run_chain

if TYPE_CHECKING:
    from hstobit_core.config import ChainConfig, ImportedMethod, SimulationScenario, Study
    from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger(__name__)
_tracer = trace.get_tracer(__name__)

THREADS_ENV = "HSTOBIT_THREADS"
HORSESHOE = "horseshoe"
DATA_STREAM = 0
CHAIN_STREAM = 1

FitProcedure = Callable[[TobitDataset, "ChainConfig", RngStream], "NDArray[np.float64]"]


# ---------------------------------------------------------------------------
# Design and truth
# ---------------------------------------------------------------------------


def ar1_covariance_factor(p: int, rho: float) -> NDArray[np.float64]:
    """Closed-form lower Cholesky factor of Σ_ij = rho^|i-j|.

    Column 0 holds rho^i; below the diagonal, column j >= 1 holds
    rho^(i-j) · sqrt(1 - rho²).
    """
    if p < 1:
        raise DomainError(f"p must be positive, got {p}")
    if not abs(rho) < 1:
        raise DomainError(f"AR(1) correlation must satisfy |rho| < 1, got {rho}")
    i, j = np.indices((p, p))
    lag = np.where(j <= i, i - j, 0)
    factor = np.where(j <= i, np.power(float(rho), lag), 0.0)
    factor[:, 1:] *= math.sqrt(1.0 - rho * rho)
    return factor


def make_beta0(p: int, s_star: int) -> NDArray[np.float64]:
    """First ceil(s*/2) entries +1, next floor(s*/2) entries -1, rest 0."""
    if not 0 <= s_star <= p:
        raise DomainError(f"s_star must lie in [0, p={p}], got {s_star}")
    beta = np.zeros(p)
    half = (s_star + 1) // 2
    beta[:half] = 1.0
    beta[half:s_star] = -1.0
    return beta


def _noise(family: NoiseFamily, size: int, rng: RngStream) -> NDArray[np.float64]:
    if family == NoiseFamily.STUDENT_T3:
        return rng.generator.standard_t(3, size=size)
    return rng.generator.standard_normal(size)


def _draw_rows(
    n: int, factor: NDArray[np.float64], beta0: NDArray[np.float64], scn: SimulationScenario, rng: RngStream
) -> TobitDataset:
    X = rng.generator.standard_normal((n, factor.shape[0])) @ factor.T
    latent = X @ beta0 + _noise(scn.noise, n, rng)
    return TobitDataset(X=X, y=np.maximum(latent, scn.c), c=scn.c)


def generate_dataset(
    scn: SimulationScenario, rep_index: int, rng: RngStream
) -> tuple[TobitDataset, TobitDataset, NDArray[np.float64]]:
    """Training set, independent test set of ``n_test`` rows and the true β₀."""
    stream = rng.substream(rep_index, DATA_STREAM)
    factor = ar1_covariance_factor(scn.p, scn.rho_x)
    beta0 = make_beta0(scn.p, scn.s_star)
    train = _draw_rows(scn.n, factor, beta0, scn, stream)
    test = _draw_rows(scn.n_test, factor, beta0, scn, stream)
    return train, test, beta0


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Metrics:
    l2_beta: float
    l2_xbeta: float
    l2_y: float
    l2_ytest: float

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


def evaluation_metrics(
    beta_hat: ArrayLike,
    beta0: ArrayLike,
    X_train: ArrayLike,
    y_train: ArrayLike,
    X_test: ArrayLike,
    y_test: ArrayLike,
    c: float = 0.0,
) -> Metrics:
    """Squared-error metrics for coefficients, signal and censored predictions.

    l2_beta = ‖β̂ - β₀‖²/p, l2_xbeta = ‖X(β̂ - β₀)‖²/n, l2_y and l2_ytest are
    mean squared errors of max(xᵀβ̂, c) on the training and test rows.
    """
    b_hat = np.asarray(beta_hat, dtype=float)
    b0 = np.asarray(beta0, dtype=float)
    X, y = np.asarray(X_train, dtype=float), np.asarray(y_train, dtype=float)
    Xt, yt = np.asarray(X_test, dtype=float), np.asarray(y_test, dtype=float)
    p = b0.shape[0]
    if b_hat.shape != (p,):
        raise DomainError(f"beta_hat has shape {b_hat.shape}, beta0 has shape {b0.shape}")
    if X.ndim != 2 or X.shape[1] != p or y.shape != (X.shape[0],):
        raise DomainError(f"Training data shapes {X.shape}/{y.shape} do not match p={p}")
    if Xt.ndim != 2 or Xt.shape[1] != p or yt.shape != (Xt.shape[0],):
        raise DomainError(f"Test data shapes {Xt.shape}/{yt.shape} do not match p={p}")
    diff = b_hat - b0
    return Metrics(
        l2_beta=float(diff @ diff / p),
        l2_xbeta=float(np.mean((X @ diff) ** 2)),
        l2_y=float(np.mean((y - predict(X, b_hat, c)) ** 2)),
        l2_ytest=float(np.mean((yt - predict(Xt, b_hat, c)) ** 2)),
    )


# ---------------------------------------------------------------------------
# Methods
# ---------------------------------------------------------------------------


def horseshoe_fit(data: TobitDataset, chain: ChainConfig, rng: RngStream) -> NDArray[np.float64]:
    """Posterior-mean β of the tempered Horseshoe Gibbs sampler."""
    return run_chain(data, chain, rng).beta_hat()


def load_imported_coefficients(method: ImportedMethod, p: int) -> dict[int, NDArray[np.float64]]:
    """Read ``replicate, beta_1..beta_p`` rows keyed by 0-based replicate index."""
    frame = read_numeric_csv(method.coefficients_csv)
    expected = ["replicate"] + [f"beta_{j}" for j in range(1, p + 1)]
    if list(frame.columns) != expected:
        raise SchemaError(
            f"Coefficient file for '{method.label}' must have columns replicate, beta_1..beta_{p}; "
            f"got {', '.join(frame.columns)}"
        )
    reps = frame["replicate"].to_numpy()
    if np.any(reps != np.round(reps)) or np.any(reps < 0):
        raise SchemaError(f"Replicate indices for '{method.label}' must be nonnegative integers")
    if len(set(reps.tolist())) != len(reps):
        raise SchemaError(f"Duplicate replicate indices in coefficients for '{method.label}'")
    values = frame[expected[1:]].to_numpy(dtype=float)
    return {int(r): values[k] for k, r in enumerate(reps)}


# ---------------------------------------------------------------------------
# Replicates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReplicateRecord:
    scenario: str
    replicate: int
    method: str
    censored_fraction: float
    metrics: Metrics | None = None
    fit_seconds: float = 0.0
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.metrics is not None

    def row(self) -> dict[str, object]:
        out: dict[str, object] = {
            "scenario": self.scenario,
            "replicate": self.replicate,
            "method": self.method,
            "status": "ok" if self.ok else "failed",
            "censored_fraction": self.censored_fraction,
        }
        metrics = asdict(self.metrics) if self.metrics is not None else dict.fromkeys(Metrics.names(), np.nan)
        out.update(metrics)
        out["error"] = self.error or ""
        return out


@dataclass(frozen=True)
class _ReplicateTask:
    scn: SimulationScenario
    rep: int
    procedures: Mapping[str, FitProcedure]
    imported: Mapping[str, NDArray[np.float64] | None]


def _run_replicate(task: _ReplicateTask) -> list[ReplicateRecord]:
    scn, rep = task.scn, task.rep
    base = RngStream(scn.base_seed)
    with _tracer.start_as_current_span(
        "hstobit.scenario.replicate", attributes={"scenario.name": scn.name, "scenario.replicate": rep}
    ):
        train, test, beta0 = generate_dataset(scn, rep, base)
        fit_data = train.standardized() if scn.standardize else train
        records = []
        for label, fit in task.procedures.items():
            start = time.perf_counter()
            try:
                beta_hat = fit_data.to_original_scale(fit(fit_data, scn.chain, base.substream(rep, CHAIN_STREAM)))
                metrics = evaluation_metrics(beta_hat, beta0, train.X, train.y, test.X, test.y, scn.c)
            except HstobitError as exc:
                records.append(ReplicateRecord(scn.name, rep, label, train.censored_fraction, error=str(exc)))
                continue
            elapsed = time.perf_counter() - start
            records.append(ReplicateRecord(scn.name, rep, label, train.censored_fraction, metrics, elapsed))
        for label, beta_hat in task.imported.items():
            if beta_hat is None:
                records.append(
                    ReplicateRecord(scn.name, rep, label, train.censored_fraction, error="no coefficients")
                )
                continue
            metrics = evaluation_metrics(beta_hat, beta0, train.X, train.y, test.X, test.y, scn.c)
            records.append(ReplicateRecord(scn.name, rep, label, train.censored_fraction, metrics))
    return records


def resolve_threads(threads: int | None = None) -> int:
    """Explicit value, else ``HSTOBIT_THREADS``, else 1."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            threads = int(raw)
        except ValueError as exc:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if threads < 1:
        raise DomainError(f"Thread count must be positive, got {threads}")
    return threads


@dataclass
class ScenarioResult:
    """All replicate records of one scenario, in (replicate, method) order."""

    scenario: SimulationScenario
    records: list[ReplicateRecord] = field(default_factory=list)

    @property
    def methods(self) -> list[str]:
        return list(dict.fromkeys(r.method for r in self.records))

    @property
    def failed(self) -> list[ReplicateRecord]:
        return [r for r in self.records if not r.ok]

    def replicates_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.row() for r in self.records])

    def summary_frame(self) -> pd.DataFrame:
        """Mean and SD (ddof=1, 0 for a single replicate) of each metric per method."""
        rows = []
        for method in self.methods:
            ok = [r for r in self.records if r.method == method and r.ok]
            row: dict[str, object] = {
                "scenario": self.scenario.name,
                "method": method,
                "n_ok": len(ok),
                "n_failed": sum(1 for r in self.records if r.method == method and not r.ok),
                "censored_fraction": float(np.mean([r.censored_fraction for r in ok])) if ok else np.nan,
            }
            for name in Metrics.names():
                values = np.array([getattr(r.metrics, name) for r in ok])
                row[f"{name}_mean"] = float(values.mean()) if ok else np.nan
                row[f"{name}_sd"] = float(values.std(ddof=1)) if len(ok) > 1 else (0.0 if ok else np.nan)
            rows.append(row)
        return pd.DataFrame(rows)

    def table_frame(self) -> pd.DataFrame:
        """Table orientation: cells "mean (sd)"; l2_beta multiplied by ``beta_error_scale``."""
        summary = self.summary_frame()
        scale = self.scenario.beta_error_scale
        beta_label = "l2_beta" if scale == 1 else f"{scale:g}x l2_beta"
        out = summary[["scenario", "method"]].copy()
        for name in Metrics.names():
            factor = scale if name == "l2_beta" else 1.0
            label = beta_label if name == "l2_beta" else name
            out[label] = [
                f"{factor * m:.2f} ({factor * s:.2f})"
                for m, s in zip(summary[f"{name}_mean"], summary[f"{name}_sd"])
            ]
        return out

    def timings_frame(self) -> pd.DataFrame:
        rows = []
        for method in self.methods:
            secs = [r.fit_seconds for r in self.records if r.method == method and r.ok]
            rows.append(
                {
                    "scenario": self.scenario.name,
                    "method": method,
                    "mean_fit_seconds": float(np.mean(secs)) if secs else np.nan,
                    "total_fit_seconds": float(np.sum(secs)),
                }
            )
        return pd.DataFrame(rows)


def run_scenario(
    scn: SimulationScenario,
    methods: Mapping[str, FitProcedure] | None = None,
    threads: int | None = None,
) -> ScenarioResult:
    """Generate, fit and score every replicate of ``scn``.

    ``methods`` maps labels to fit procedures (default: the Horseshoe
    sampler); coefficient files listed in ``scn.methods`` are scored
    alongside. Procedures must be picklable when ``threads > 1``. Failed
    fits are kept as failed records and left out of the summaries.
    """
    procedures = dict(methods) if methods is not None else {HORSESHOE: horseshoe_fit}
    imported_tables = {m.label: load_imported_coefficients(m, scn.p) for m in scn.methods}
    clash = set(procedures) & set(imported_tables)
    if clash:
        raise DomainError(f"Duplicate method labels: {sorted(clash)}")
    tasks = [
        _ReplicateTask(scn, rep, procedures, {label: rows.get(rep) for label, rows in imported_tables.items()})
        for rep in range(scn.n_reps)
    ]
    workers = min(resolve_threads(threads), scn.n_reps)

    with _tracer.start_as_current_span(
        "hstobit.scenario.run",
        attributes={"scenario.name": scn.name, "scenario.n_reps": scn.n_reps, "scenario.threads": workers},
    ) as span:
        if workers == 1:
            batches = [_run_replicate(task) for task in tasks]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                batches = list(pool.map(_run_replicate, tasks))
        result = ScenarioResult(scn, [record for batch in batches for record in batch])
        span.set_attributes({"scenario.failed": len(result.failed)})

    for record in result.failed:
        logger.warning(
            "Scenario %s replicate %d (%s) failed and is excluded: %s",
            scn.name,
            record.replicate,
            record.method,
            record.error,
        )
    return result


def run_study(
    study: Study, methods: Mapping[str, FitProcedure] | None = None, threads: int | None = None
) -> list[ScenarioResult]:
    """Run every scenario of ``study`` in order."""
    return [run_scenario(scn, methods, threads) for scn in study.scenarios]

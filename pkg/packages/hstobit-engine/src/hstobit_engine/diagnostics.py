"""Single-chain diagnostics: autocorrelation, effective sample size,
trace/ACF export and the tempering importance-weight check.

Exported tables share one long schema, ``param_index, lag_or_iter, value``,
with 0-based coefficient indices.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd
from hstobit_core.errors import DomainError
from hstobit_core.likelihood import augmented_tempered_log_likelihood, tobit_log_likelihood
from scipy import signal, special

if TYPE_CHECKING:
    from hstobit_core.config import ModelConfig
    from hstobit_core.dataset import TobitDataset
    from numpy.typing import ArrayLike, NDArray

    from .chain import PosteriorSamples

logger = logging.getLogger(__name__)

EXPORT_COLUMNS = ("param_index", "lag_or_iter", "value")
LOW_RELATIVE_ESS = 0.5


@dataclass(frozen=True)
class AcfResult:
    lags: NDArray[np.int64]
    values: NDArray[np.float64]


def _series(series: ArrayLike) -> NDArray[np.float64]:
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise DomainError(f"Expected a 1-D series, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DomainError("Series contains non-finite values")
    if x.size == 0 or np.ptp(x) == 0:
        raise DomainError("Series has zero variance")
    return x


def _autocovariance(x: NDArray[np.float64]) -> NDArray[np.float64]:
    """Biased (divide-by-n) autocovariance at every lag, via FFT."""
    centred = x - x.mean()
    full = signal.correlate(centred, centred, mode="full", method="fft")
    return full[x.size - 1 :] / x.size


def autocorrelation(series: ArrayLike, max_lag: int) -> AcfResult:
    """Sample ACF at lags 0..max_lag using the biased estimator."""
    x = _series(series)
    if max_lag < 1:
        raise DomainError(f"max_lag must be positive, got {max_lag}")
    if x.size <= max_lag:
        raise DomainError(f"Series of length {x.size} is too short for max_lag={max_lag}")
    acov = _autocovariance(x)
    values = np.clip(acov[: max_lag + 1] / acov[0], -1.0, 1.0)
    values[0] = 1.0
    return AcfResult(lags=np.arange(max_lag + 1), values=values)


def effective_sample_size(series: ArrayLike) -> float:
    """n / τ̂ with τ̂ from Geyer's initial positive then monotone sequence.

    τ̂ is floored at 1/log10(n), so antithetic chains may report ESS > n.
    """
    x = _series(series)
    n = x.size
    if n < 4:
        raise DomainError(f"Need at least 4 draws for an ESS estimate, got {n}")
    acov = _autocovariance(x)
    rho = acov / acov[0]

    # Initial positive sequence: keep pairs while their sum is positive.
    rho_t = np.zeros(n)
    even, odd = 1.0, rho[1]
    rho_t[0], rho_t[1] = even, odd
    t = 1
    while t < n - 3 and even + odd > 0.0:
        even, odd = rho[t + 1], rho[t + 2]
        if even + odd >= 0.0:
            rho_t[t + 1], rho_t[t + 2] = even, odd
        t += 2
    max_t = t - 2
    if even > 0.0:
        rho_t[max_t + 1] = even

    # Initial monotone sequence: pair sums must not increase.
    t = 1
    while t <= max_t - 2:
        if rho_t[t + 1] + rho_t[t + 2] > rho_t[t - 1] + rho_t[t]:
            rho_t[t + 1] = rho_t[t + 2] = (rho_t[t - 1] + rho_t[t]) / 2.0
        t += 2

    tau = -1.0 + 2.0 * np.sum(rho_t[: max_t + 1]) + np.sum(rho_t[max_t + 1 : max_t + 2])
    tau = max(tau, 1.0 / np.log10(n))
    return float(n / tau)


def _check_indices(indices: Sequence[int], p: int) -> list[int]:
    out = [int(i) for i in indices]
    bad = [i for i in out if not 0 <= i < p]
    if bad:
        raise DomainError(f"Coefficient indices out of range [0, {p}): {bad}")
    return out


def _empty_export() -> pd.DataFrame:
    dtypes = ("int64", "int64", "float64")
    return pd.DataFrame({col: pd.Series(dtype=dt) for col, dt in zip(EXPORT_COLUMNS, dtypes)})


def trace_export(samples: PosteriorSamples, coefficient_indices: Sequence[int]) -> pd.DataFrame:
    """Long table of stored β draws: one row per (index, kept iteration)."""
    indices = _check_indices(coefficient_indices, samples.p)
    if not indices:
        return _empty_export()
    kept = samples.n_kept
    return pd.DataFrame(
        {
            "param_index": np.repeat(indices, kept).astype(np.int64),
            "lag_or_iter": np.tile(samples.iterations, len(indices)).astype(np.int64),
            "value": samples.beta_draws[:, indices].T.reshape(-1),
        }
    )


def acf_export(samples: PosteriorSamples, coefficient_indices: Sequence[int], max_lag: int) -> pd.DataFrame:
    """Long table of ACF values at lags 0..max_lag per requested coefficient."""
    indices = _check_indices(coefficient_indices, samples.p)
    frames = []
    for j in indices:
        acf = autocorrelation(samples.beta_draws[:, j], max_lag)
        frames.append(pd.DataFrame({"param_index": j, "lag_or_iter": acf.lags, "value": acf.values}))
    if not frames:
        return _empty_export()
    return pd.concat(frames, ignore_index=True)


# ---------------------------------------------------------------------------
# Tempering importance weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImportanceWeightSummary:
    n_draws: int
    log_weight_variance: float
    relative_ess: float


def importance_log_weights(samples: PosteriorSamples, data: TobitDataset, cfg: ModelConfig) -> NDArray[np.float64]:
    """Per-draw log weight of the exact fractional posterior against the sampled one.

    The sampler targets prior × (integrated tempered complete-data density);
    the exact fractional posterior is prior × L_n^α. Priors cancel, and so
    do all uncensored terms, leaving a censored-rows-only correction. At
    α = 1 every weight is 0.
    """
    beta = samples.beta_draws
    if beta.shape[1] != data.p:
        raise DomainError(f"Samples have {beta.shape[1]} coefficients, dataset has {data.p}")
    alpha = cfg.alpha
    return np.array(
        [
            alpha * tobit_log_likelihood(b, s2, data) - augmented_tempered_log_likelihood(b, s2, data, alpha)
            for b, s2 in zip(beta, samples.sigma2_draws)
        ]
    )


def importance_weight_summary(log_weights: ArrayLike) -> ImportanceWeightSummary:
    """Relative ESS (Σw)² / (N Σw²) of the self-normalized weights."""
    lw = np.asarray(log_weights, dtype=float)
    if lw.ndim != 1 or lw.size == 0:
        raise DomainError("Need a non-empty vector of log weights")
    if not np.all(np.isfinite(lw)):
        raise DomainError("Log weights contain non-finite values")
    log_ess = 2.0 * special.logsumexp(lw) - special.logsumexp(2.0 * lw)
    summary = ImportanceWeightSummary(
        n_draws=int(lw.size),
        log_weight_variance=float(lw.var()),
        relative_ess=float(np.exp(log_ess) / lw.size),
    )
    if summary.relative_ess < LOW_RELATIVE_ESS:
        logger.warning(
            "Tempering importance weights are uneven: relative ESS %.3f over %d draws",
            summary.relative_ess,
            summary.n_draws,
        )
    return summary

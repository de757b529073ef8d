"""Chain runner and posterior summaries.

``run_chain`` drives a ``GibbsSampler`` for ``n_iter`` sweeps from the
fixed starting state and keeps every ``thin``-th draw after ``burn_in``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd
from hstobit_core.dataset import RESERVED_FEATURE_NAMES
from hstobit_core.errors import DomainError, NumericError, SchemaError
from hstobit_core.rng import RngStream
from hstobit_core.state import HorseshoeState
from opentelemetry import trace

from .gibbs import GibbsSampler

if TYPE_CHECKING:
    from hstobit_core.config import ChainConfig
    from hstobit_core.dataset import TobitDataset
    from numpy.typing import NDArray

logger = logging.getLogger(__name__)
_tracer = trace.get_tracer(__name__)


@dataclass(frozen=True)
class PosteriorSamples:
    """Retained draws of one chain.

    ``iterations`` holds the 1-based sweep index of every kept draw.
    ``lambda2_draws`` is only populated when the chain was run with
    ``store_hyperparams``.
    """

    beta_draws: NDArray[np.float64]
    sigma2_draws: NDArray[np.float64]
    tau2_draws: NDArray[np.float64]
    iterations: NDArray[np.int64]
    feature_names: tuple[str, ...]
    lambda2_draws: NDArray[np.float64] | None = None
    sampler_path: str = "direct"
    clamp_counts: dict[str, int] = field(default_factory=dict)
    elapsed_seconds: float = 0.0

    @property
    def n_kept(self) -> int:
        return int(self.beta_draws.shape[0])

    @property
    def p(self) -> int:
        return int(self.beta_draws.shape[1])

    def beta_hat(self) -> NDArray[np.float64]:
        """Posterior-mean point estimate of β."""
        if self.n_kept == 0:
            raise DomainError("No retained draws")
        return self.beta_draws.mean(axis=0)

    def rescaled(self, scales: NDArray[np.float64] | None) -> PosteriorSamples:
        """β draws mapped back through column scales (β_j / s_j)."""
        if scales is None:
            return self
        return replace(self, beta_draws=self.beta_draws / np.asarray(scales, dtype=float))

    def to_frame(self) -> pd.DataFrame:
        """Wide table: iteration, sigma2, tau2, then one column per feature.

        Datasets reject the reserved names, so the columns never collide.
        """
        frame = pd.DataFrame(self.beta_draws, columns=list(self.feature_names))
        frame.insert(0, "tau2", self.tau2_draws)
        frame.insert(0, "sigma2", self.sigma2_draws)
        frame.insert(0, "iteration", self.iterations)
        return frame

    def lambda2_frame(self) -> pd.DataFrame:
        """Wide table of local-scale draws: iteration, then one column per feature.

        Values are on the scale of the fitted design.
        """
        if self.lambda2_draws is None:
            raise DomainError("Chain was run without store_hyperparams; no lambda2 draws kept")
        frame = pd.DataFrame(self.lambda2_draws, columns=list(self.feature_names))
        frame.insert(0, "iteration", self.iterations)
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> PosteriorSamples:
        missing = [col for col in RESERVED_FEATURE_NAMES if col not in frame.columns]
        if missing:
            raise SchemaError(f"Samples table is missing columns: {', '.join(missing)}")
        names = tuple(str(col) for col in frame.columns if col not in RESERVED_FEATURE_NAMES)
        if not names:
            raise SchemaError("Samples table has no coefficient columns")
        return cls(
            beta_draws=frame[list(names)].to_numpy(dtype=float),
            sigma2_draws=frame["sigma2"].to_numpy(dtype=float),
            tau2_draws=frame["tau2"].to_numpy(dtype=float),
            iterations=frame["iteration"].to_numpy(dtype=np.int64),
            feature_names=names,
        )


def run_chain(data: TobitDataset, cfg: ChainConfig, rng: RngStream | None = None) -> PosteriorSamples:
    """Run one Gibbs chain and return its retained draws.

    Without ``rng`` the chain draws from ``RngStream(cfg.seed)``; the same
    data, config and stream state always give the same draws.
    """
    rng = rng if rng is not None else RngStream(cfg.seed)
    model = cfg.model
    sampler = GibbsSampler(data, model, cfg.sampler, cfg.auxiliary_ratio)
    state = HorseshoeState.initial(data, model)

    kept = cfg.kept
    beta = np.empty((kept, data.p))
    sigma2 = np.empty(kept)
    tau2 = np.empty(kept)
    iterations = np.empty(kept, dtype=np.int64)
    lambda2 = np.empty((kept, data.p)) if cfg.store_hyperparams else None

    with _tracer.start_as_current_span(
        "hstobit.chain.run",
        attributes={
            "chain.n": data.n,
            "chain.p": data.p,
            "chain.n_iter": cfg.n_iter,
            "chain.alpha": model.alpha,
            "chain.sampler": sampler.method,
        },
    ) as span:
        start = time.perf_counter()
        slot = 0
        for it in range(1, cfg.n_iter + 1):
            try:
                sampler.sweep(state, rng)
            except NumericError as exc:
                span.set_status(trace.StatusCode.ERROR, str(exc))
                raise exc.at_iteration(it) from exc
            if it > cfg.burn_in and (it - cfg.burn_in) % cfg.thin == 0:
                beta[slot] = state.beta
                sigma2[slot] = state.sigma2
                tau2[slot] = state.tau2
                iterations[slot] = it
                if lambda2 is not None:
                    lambda2[slot] = state.lambda2
                slot += 1
        elapsed = time.perf_counter() - start
        span.set_attributes({"chain.kept": kept, "chain.seconds": elapsed})

    clamps = dict(sampler.clamps)
    if clamps:
        logger.warning("Scale parameters were clamped during sampling: %s", clamps)
    logger.debug("Chain finished: %d sweeps, %d kept, %.3fs (%s)", cfg.n_iter, kept, elapsed, sampler.method)

    return PosteriorSamples(
        beta_draws=beta,
        sigma2_draws=sigma2,
        tau2_draws=tau2,
        iterations=iterations,
        feature_names=data.feature_names,
        lambda2_draws=lambda2,
        sampler_path=sampler.method,
        clamp_counts=clamps,
        elapsed_seconds=elapsed,
    )


def _quantile_label(q: float) -> str:
    return f"q{100.0 * q:g}"


def posterior_summary(samples: PosteriorSamples, level: float = 0.95) -> pd.DataFrame:
    """Per-coefficient mean, median, equal-tailed credible bounds and SD.

    Columns are ``coefficient, mean, median, q<lo>, q<hi>, sd``; at the
    default level the bounds are ``q2.5`` and ``q97.5``.
    """
    if not 0 < level < 1:
        raise DomainError(f"Credible level must lie in (0, 1), got {level}")
    if samples.n_kept < 2:
        raise DomainError(f"Need at least 2 retained draws for a summary, got {samples.n_kept}")
    lo = (1.0 - level) / 2.0
    draws = samples.beta_draws
    return pd.DataFrame(
        {
            "coefficient": list(samples.feature_names),
            "mean": draws.mean(axis=0),
            "median": np.median(draws, axis=0),
            _quantile_label(lo): np.quantile(draws, lo, axis=0),
            _quantile_label(1.0 - lo): np.quantile(draws, 1.0 - lo, axis=0),
            "sd": draws.std(axis=0, ddof=1),
        }
    )

"""Joint-distribution check of the Gibbs sampler on a tiny model.

Two simulators target the same joint law of (parameters, latent z, y):

* marginal-conditional: independent draws of the Horseshoe hierarchy and
  σ² from the parameter marginal of the sampled joint;
* successive-conditional: one Gibbs sweep given y, then fresh data
  z ~ N(Xβ, σ²/α), y = max(z, c), repeated.

If every conditional is right, test-function means agree. Horseshoe
moments of β and τ² are infinite, so the test functions are atan(β_j),
log τ² and log σ². A successive chain that raises or leaves a non-finite
test function is stopped and reported with infinite z-scores.

With α < 1 the sampled joint is prior × N(z | Xβ, σ²)^α, and integrating
z out tilts the σ² marginal by (σ²)^((1-α)n/2): σ² ~ IG(a₀ - (1-α)n/2, b₀).
That law is proper only when a₀ > (1-α)n/2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd
from hstobit_core.config import ModelConfig
from hstobit_core.dataset import TobitDataset
from hstobit_core.errors import DomainError, HstobitError
from hstobit_core.rng import RngStream
from hstobit_core.state import HorseshoeState
from hstobit_core.stats import sample_inverse_gamma

from .diagnostics import effective_sample_size
from .gibbs import GibbsSampler

if TYPE_CHECKING:
    from numpy.typing import NDArray

logger = logging.getLogger(__name__)

MAX_N = 10
MAX_P = 3
Z_THRESHOLD = 4.0


@dataclass(frozen=True)
class GewekeSetup:
    """Fixed design and model settings of the tiny test model."""

    X: NDArray[np.float64]
    c: float = 0.0
    model: ModelConfig = field(default_factory=lambda: ModelConfig(alpha=1.0))

    def __post_init__(self) -> None:
        n, p = self.X.shape
        if n > MAX_N or p > MAX_P:
            raise DomainError(f"Geweke model must have n <= {MAX_N} and p <= {MAX_P}, got n={n}, p={p}")
        if self.model.sigma2_fixed is None and self.sigma2_marginal_shape <= 0:
            bound = 0.5 * (1.0 - self.model.alpha) * n
            raise DomainError(f"a0 must exceed (1 - alpha) * n / 2 = {bound:g} for a proper sigma2 marginal")

    @classmethod
    def tiny(cls, seed: int = 0, n: int = 8, p: int = 3, c: float = 0.0, model: ModelConfig | None = None):
        X = RngStream(seed).generator.standard_normal((n, p))
        return cls(X=X, c=c, model=model if model is not None else ModelConfig(alpha=1.0))

    @property
    def sigma2_marginal_shape(self) -> float:
        """Shape of the σ² marginal under the sampled joint, a₀ - (1-α)n/2."""
        return self.model.a0 - 0.5 * (1.0 - self.model.alpha) * self.X.shape[0]

    @property
    def names(self) -> tuple[str, ...]:
        names = tuple(f"atan_beta_{j}" for j in range(self.X.shape[1])) + ("log_tau2",)
        return names if self.model.sigma2_fixed is not None else names + ("log_sigma2",)


@dataclass(frozen=True)
class GewekeResult:
    """``diverged_at`` is the draw at which the successive chain stopped, if it did."""

    names: tuple[str, ...]
    marginal_means: NDArray[np.float64]
    successive_means: NDArray[np.float64]
    z_scores: NDArray[np.float64]
    diverged_at: int | None = None

    def passed(self, threshold: float = Z_THRESHOLD) -> bool:
        return bool(np.all(np.abs(self.z_scores) < threshold))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "statistic": list(self.names),
                "marginal_mean": self.marginal_means,
                "successive_mean": self.successive_means,
                "z": self.z_scores,
            }
        )


def _test_functions(state: HorseshoeState, setup: GewekeSetup) -> NDArray[np.float64]:
    values = [*np.arctan(state.beta), np.log(state.tau2)]
    if setup.model.sigma2_fixed is None:
        values.append(np.log(state.sigma2))
    return np.asarray(values)


def _prior_state(setup: GewekeSetup, rng: RngStream) -> HorseshoeState:
    """Parameters drawn from the prior; z is left empty."""
    n, p = setup.X.shape
    cfg = setup.model
    xi = float(sample_inverse_gamma(0.5, 1.0, rng))
    tau2 = float(sample_inverse_gamma(0.5, 1.0 / xi, rng))
    nu = np.asarray(sample_inverse_gamma(0.5, 1.0, rng, size=p), dtype=float)
    lambda2 = np.asarray(sample_inverse_gamma(0.5, 1.0 / nu, rng), dtype=float)
    beta = np.sqrt(tau2 * lambda2) * rng.generator.standard_normal(p)
    if cfg.sigma2_fixed is not None:
        sigma2 = cfg.sigma2_fixed
    else:
        sigma2 = float(sample_inverse_gamma(setup.sigma2_marginal_shape, cfg.b0, rng))
    return HorseshoeState(z=np.zeros(n), beta=beta, lambda2=lambda2, nu=nu, tau2=tau2, xi=xi, sigma2=sigma2)


def _resimulate(state: HorseshoeState, setup: GewekeSetup, rng: RngStream) -> TobitDataset:
    sd = np.sqrt(state.sigma2 / setup.model.alpha)
    z = setup.X @ state.beta + sd * rng.generator.standard_normal(setup.X.shape[0])
    state.z = z
    return TobitDataset(X=setup.X, y=np.maximum(z, setup.c), c=setup.c)


def geweke_joint_test(
    setup: GewekeSetup,
    n_outer: int,
    rng: RngStream,
    sampler_cls: type[GibbsSampler] = GibbsSampler,
) -> GewekeResult:
    """Standardized differences of test-function means between the two simulators.

    Marginal standard errors assume iid draws; successive ones use the
    per-statistic effective sample size.
    """
    if n_outer < 10:
        raise DomainError(f"n_outer must be at least 10, got {n_outer}")

    marginal_rng = rng.substream(0)
    marginal = np.array([_test_functions(_prior_state(setup, marginal_rng), setup) for _ in range(n_outer)])

    chain_rng = rng.substream(1)
    state = _prior_state(setup, chain_rng)
    data = _resimulate(state, setup, chain_rng)
    successive = np.empty_like(marginal)
    diverged_at = None
    with np.errstate(over="ignore", invalid="ignore"):
        for m in range(n_outer):
            try:
                sampler_cls(data, setup.model, method="direct").sweep(state, chain_rng)
                successive[m] = _test_functions(state, setup)
                if not np.all(np.isfinite(successive[m])):
                    raise DomainError("non-finite test function")
                data = _resimulate(state, setup, chain_rng)
            except HstobitError as exc:
                diverged_at = m
                logger.warning("Successive-conditional chain diverged at draw %d: %s", m, exc)
                break

    m_mean = marginal.mean(axis=0)
    if diverged_at is not None:
        done = successive[:diverged_at]
        s_mean = done.mean(axis=0) if diverged_at > 0 else np.full(m_mean.shape, np.nan)
        return GewekeResult(setup.names, m_mean, s_mean, np.full(m_mean.shape, np.inf), diverged_at)

    s_mean = successive.mean(axis=0)
    m_se2 = marginal.var(axis=0, ddof=1) / n_outer
    ess = np.array([effective_sample_size(successive[:, k]) for k in range(successive.shape[1])])
    s_se2 = successive.var(axis=0, ddof=1) / ess
    z = (m_mean - s_mean) / np.sqrt(m_se2 + s_se2)

    result = GewekeResult(setup.names, m_mean, s_mean, z)
    logger.info("Geweke test over %d draws: max |z| = %.2f", n_outer, float(np.max(np.abs(z))))
    return result

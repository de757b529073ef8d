"""Full-conditional updates of the data-augmentation Horseshoe Tobit sampler.

Each ``update_*`` function replaces one block of a ``HorseshoeState`` in
place with an exact draw from its full conditional. Tempering by α is
applied to the complete-data density, N(z | Xβ, σ²)^α ∝ N(z | Xβ, σ²/α),
so every conditional stays closed-form:

    z_i (censored)   ~ N(x_iᵀβ, σ²/α) truncated to (-inf, c]
    β                ~ N(Σ (α/σ²) Xᵀz, Σ),  Σ = (α XᵀX / σ² + D⁻¹)⁻¹
    λ_j²             ~ IG(1, 1/ν_j + β_j² / (2τ²))
    ν_j              ~ IG(1, 1 + 1/λ_j²)
    τ²               ~ IG((p+1)/2, 1/ξ + ½ Σ_j β_j²/λ_j²)
    ξ                ~ IG(1, 1 + 1/τ²)
    σ²               ~ IG(a₀ + αn/2, b₀ + (α/2) Σ_i (z_i - x_iᵀβ)²)

``GibbsSampler`` binds the steps to one dataset and runs them in that
order as one sweep.
"""

from __future__ import annotations

import logging
from collections import Counter
from typing import TYPE_CHECKING, Literal

import numpy as np
from hstobit_core.errors import DomainError, NumericError
from hstobit_core.stats import (
    cholesky_lower,
    cholesky_solve,
    sample_inverse_gamma,
    sample_truncated_normal,
)

if TYPE_CHECKING:
    from hstobit_core.config import ModelConfig
    from hstobit_core.dataset import TobitDataset
    from hstobit_core.rng import RngStream
    from hstobit_core.state import HorseshoeState
    from numpy.typing import NDArray

logger = logging.getLogger(__name__)

SCALE_FLOOR = 1e-300
SCALE_CEILING = 1e300

BetaMethod = Literal["direct", "auxiliary"]


def _clamp(values: NDArray[np.float64] | float, name: str, counter: Counter[str] | None):
    arr = np.asarray(values, dtype=float)
    clamped = np.clip(arr, SCALE_FLOOR, SCALE_CEILING)
    if counter is not None:
        hits = int(np.count_nonzero(clamped != arr))
        if hits:
            counter[name] += hits
    return float(clamped) if clamped.ndim == 0 else clamped


# ---------------------------------------------------------------------------
# Conditional parameters (shape, scale) of the inverse-gamma steps
# ---------------------------------------------------------------------------


def lambda2_conditional(beta: NDArray[np.float64], nu: NDArray[np.float64], tau2: float) -> tuple[float, NDArray]:
    return 1.0, 1.0 / nu + beta**2 / (2.0 * tau2)


def nu_conditional(lambda2: NDArray[np.float64]) -> tuple[float, NDArray]:
    return 1.0, 1.0 + 1.0 / lambda2


def tau2_conditional(beta: NDArray[np.float64], lambda2: NDArray[np.float64], xi: float) -> tuple[float, float]:
    return 0.5 * (beta.size + 1), float(1.0 / xi + 0.5 * np.sum(beta**2 / lambda2))


def xi_conditional(tau2: float) -> tuple[float, float]:
    return 1.0, 1.0 + 1.0 / tau2


def sigma2_conditional(
    z: NDArray[np.float64], X: NDArray[np.float64], beta: NDArray[np.float64], cfg: ModelConfig
) -> tuple[float, float]:
    resid = z - X @ beta
    return cfg.a0 + 0.5 * cfg.alpha * z.size, float(cfg.b0 + 0.5 * cfg.alpha * np.dot(resid, resid))


# ---------------------------------------------------------------------------
# Steps 1-7
# ---------------------------------------------------------------------------


def update_latent_z(state: HorseshoeState, data: TobitDataset, cfg: ModelConfig, rng: RngStream) -> None:
    """Step 1: z_i = y_i where observed, truncated-normal draw where censored."""
    cens = data.censored
    state.z[~cens] = data.y[~cens]
    if not cens.any():
        return
    mu = data.X[cens] @ state.beta
    sd = np.sqrt(state.sigma2 / cfg.alpha)
    state.z[cens] = sample_truncated_normal(mu, sd, -np.inf, data.c, rng)


def _beta_perturbation(d: NDArray[np.float64], n: int, rng: RngStream) -> tuple[NDArray, NDArray]:
    # Both β algorithms consume exactly these p + n normals, in this order.
    u = np.sqrt(d) * rng.generator.standard_normal(d.size)
    delta = rng.generator.standard_normal(n)
    return u, delta


def update_beta(
    state: HorseshoeState,
    data: TobitDataset,
    cfg: ModelConfig,
    rng: RngStream,
    method: BetaMethod = "direct",
    gram: NDArray[np.float64] | None = None,
    counter: Counter[str] | None = None,
) -> None:
    """Step 2: β from its Gaussian conditional.

    ``direct`` factorizes the p × p precision; ``auxiliary`` works with the
    n × n matrix Φ D Φᵀ + I instead (Φ = X √α / σ). Both are the same
    perturb-then-solve map of the same normals, so given identical stream
    states they return the same draw up to rounding.
    """
    n, p = data.n, data.p
    d = _clamp(state.prior_variances, "prior_variance", counter)
    scale = np.sqrt(cfg.alpha / state.sigma2)
    target = state.z * scale
    u, delta = _beta_perturbation(d, n, rng)
    try:
        if method == "direct":
            xtx = data.X.T @ data.X if gram is None else gram
            precision = (scale * scale) * xtx
            precision[np.diag_indices(p)] += 1.0 / d
            rhs = scale * (data.X.T @ (target - delta)) + u / d
            state.beta = cholesky_solve(cholesky_lower(precision), rhs)
        elif method == "auxiliary":
            phi = data.X * scale
            m = (phi * d) @ phi.T
            m[np.diag_indices(n)] += 1.0
            w = cholesky_solve(cholesky_lower(m), target - phi @ u - delta)
            state.beta = u + d * (phi.T @ w)
        else:
            raise DomainError(f"Unknown beta sampler '{method}'")
    except NumericError as exc:
        raise NumericError(
            f"beta update failed ({method}): {exc.reason}",
            pivot=exc.pivot,
            tau2=state.tau2,
            min_lambda2=float(np.min(state.lambda2)),
        ) from exc


def update_lambda2(
    state: HorseshoeState, cfg: ModelConfig, rng: RngStream, counter: Counter[str] | None = None
) -> None:
    """Step 3: local scales, independently over coefficients."""
    shape, scale = lambda2_conditional(state.beta, state.nu, state.tau2)
    state.lambda2 = _clamp(sample_inverse_gamma(shape, scale, rng), "lambda2", counter)


def update_nu(state: HorseshoeState, rng: RngStream) -> None:
    """Step 4: local auxiliaries."""
    shape, scale = nu_conditional(state.lambda2)
    state.nu = np.asarray(sample_inverse_gamma(shape, scale, rng), dtype=float)


def update_tau2(state: HorseshoeState, cfg: ModelConfig, rng: RngStream, counter: Counter[str] | None = None) -> None:
    """Step 5: global scale."""
    shape, scale = tau2_conditional(state.beta, state.lambda2, state.xi)
    state.tau2 = _clamp(sample_inverse_gamma(shape, scale, rng), "tau2", counter)


def update_xi(state: HorseshoeState, rng: RngStream) -> None:
    """Step 6: global auxiliary."""
    shape, scale = xi_conditional(state.tau2)
    state.xi = float(sample_inverse_gamma(shape, scale, rng))


def update_sigma2(
    state: HorseshoeState,
    data: TobitDataset,
    cfg: ModelConfig,
    rng: RngStream,
    counter: Counter[str] | None = None,
) -> None:
    """Step 7: noise variance; a no-op when σ² is fixed."""
    if cfg.sigma2_fixed is not None:
        state.sigma2 = cfg.sigma2_fixed
        return
    shape, scale = sigma2_conditional(state.z, data.X, state.beta, cfg)
    state.sigma2 = _clamp(sample_inverse_gamma(shape, scale, rng), "sigma2", counter)


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------


def choose_beta_method(n: int, p: int, sampler: str = "auto", auxiliary_ratio: float = 2.0) -> BetaMethod:
    """``auto`` picks the auxiliary path when p > auxiliary_ratio · n."""
    if sampler == "auto":
        return "auxiliary" if p > auxiliary_ratio * n else "direct"
    if sampler in ("direct", "auxiliary"):
        return sampler  # type: ignore[return-value]
    raise DomainError(f"Unknown beta sampler '{sampler}'")


class GibbsSampler:
    """Runs the seven conditional updates, in order, against one dataset.

    Subclasses may override a single step; the Geweke harness relies on
    this to check that a corrupted conditional is detected.
    """

    def __init__(
        self,
        data: TobitDataset,
        cfg: ModelConfig,
        method: BetaMethod | Literal["auto"] = "auto",
        auxiliary_ratio: float = 2.0,
    ) -> None:
        self.data = data
        self.cfg = cfg
        self.method = choose_beta_method(data.n, data.p, method, auxiliary_ratio)
        self.gram = data.X.T @ data.X if self.method == "direct" else None
        self.clamps: Counter[str] = Counter()

    def update_latent_z(self, state: HorseshoeState, rng: RngStream) -> None:
        update_latent_z(state, self.data, self.cfg, rng)

    def update_beta(self, state: HorseshoeState, rng: RngStream) -> None:
        update_beta(state, self.data, self.cfg, rng, self.method, self.gram, self.clamps)

    def update_lambda2(self, state: HorseshoeState, rng: RngStream) -> None:
        update_lambda2(state, self.cfg, rng, self.clamps)

    def update_nu(self, state: HorseshoeState, rng: RngStream) -> None:
        update_nu(state, rng)

    def update_tau2(self, state: HorseshoeState, rng: RngStream) -> None:
        update_tau2(state, self.cfg, rng, self.clamps)

    def update_xi(self, state: HorseshoeState, rng: RngStream) -> None:
        update_xi(state, rng)

    def update_sigma2(self, state: HorseshoeState, rng: RngStream) -> None:
        update_sigma2(state, self.data, self.cfg, rng, self.clamps)

    def sweep(self, state: HorseshoeState, rng: RngStream) -> None:
        """One full cycle through Steps 1 to 7."""
        self.update_latent_z(state, rng)
        self.update_beta(state, rng)
        self.update_lambda2(state, rng)
        self.update_nu(state, rng)
        self.update_tau2(state, rng)
        self.update_xi(state, rng)
        self.update_sigma2(state, rng)

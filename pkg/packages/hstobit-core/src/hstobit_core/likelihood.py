"""Tobit log-likelihood, the fractional posterior kernel and censored prediction."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from scipy import stats

from .errors import DomainError
from .stats import log_std_normal_cdf

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from .config import ModelConfig
    from .dataset import TobitDataset
    from .state import HorseshoeState

_LOG_2PI = float(np.log(2.0 * np.pi))


def _linear_predictor(X: NDArray[np.float64], beta: ArrayLike) -> NDArray[np.float64]:
    b = np.asarray(beta, dtype=float)
    if b.shape != (X.shape[1],):
        raise DomainError(f"beta has shape {b.shape}, expected ({X.shape[1]},)")
    return X @ b


def tobit_log_likelihood(beta: ArrayLike, sigma2: float, data: TobitDataset) -> float:
    """Observed-data log-likelihood of a Tobit model left-censored at ``data.c``.

    Uncensored rows contribute the Gaussian log-density of y_i at x_iᵀβ;
    censored rows contribute log Φ((c - x_iᵀβ) / σ).
    """
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    eta = _linear_predictor(data.X, beta)
    sigma = np.sqrt(sigma2)
    cens = data.censored
    obs = ~cens
    resid = data.y[obs] - eta[obs]
    ll_obs = -0.5 * obs.sum() * (_LOG_2PI + np.log(sigma2)) - 0.5 * np.dot(resid, resid) / sigma2
    ll_cens = np.sum(log_std_normal_cdf((data.c - eta[cens]) / sigma)) if cens.any() else 0.0
    return float(ll_obs + ll_cens)


def augmented_tempered_log_likelihood(beta: ArrayLike, sigma2: float, data: TobitDataset, alpha: float) -> float:
    """Observed-data likelihood implied by tempering the complete-data density.

    Integrating N(z | xβ, σ²)^α over z <= c gives, per censored row,
    ((1-α)/2)·log(2πσ²) - ½·log α + log Φ((c - xβ)·√α / σ); uncensored rows
    are the plain α-tempered Gaussian terms. At α = 1 this equals
    ``tobit_log_likelihood``.
    """
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    eta = _linear_predictor(data.X, beta)
    cens = data.censored
    obs = ~cens
    resid = data.y[obs] - eta[obs]
    ll_obs = alpha * (-0.5 * obs.sum() * (_LOG_2PI + np.log(sigma2)) - 0.5 * np.dot(resid, resid) / sigma2)
    if not cens.any():
        return float(ll_obs)
    arg = (data.c - eta[cens]) * np.sqrt(alpha / sigma2)
    per_row = 0.5 * (1.0 - alpha) * (_LOG_2PI + np.log(sigma2)) - 0.5 * np.log(alpha)
    return float(ll_obs + cens.sum() * per_row + np.sum(log_std_normal_cdf(arg)))


def log_prior(state: HorseshoeState, cfg: ModelConfig) -> float:
    """Log density of the full Horseshoe hierarchy plus the σ² prior.

    β_j | λ_j², τ² ~ N(0, τ²λ_j²); λ_j² | ν_j ~ IG(½, 1/ν_j); ν_j ~ IG(½, 1);
    τ² | ξ ~ IG(½, 1/ξ); ξ ~ IG(½, 1); σ² ~ IG(a₀, b₀) unless σ² is fixed.
    """
    invgamma = stats.invgamma
    lp = np.sum(stats.norm.logpdf(state.beta, scale=np.sqrt(state.tau2 * state.lambda2)))
    lp += np.sum(invgamma.logpdf(state.lambda2, 0.5, scale=1.0 / state.nu))
    lp += np.sum(invgamma.logpdf(state.nu, 0.5, scale=1.0))
    lp += invgamma.logpdf(state.tau2, 0.5, scale=1.0 / state.xi)
    lp += invgamma.logpdf(state.xi, 0.5, scale=1.0)
    if cfg.sigma2_fixed is None:
        lp += invgamma.logpdf(state.sigma2, cfg.a0, scale=cfg.b0)
    return float(lp)


def fractional_log_posterior_kernel(state: HorseshoeState, data: TobitDataset, cfg: ModelConfig) -> float:
    """α · log L_n(β, σ²) + log prior, up to an additive constant."""
    return cfg.alpha * tobit_log_likelihood(state.beta, state.sigma2, data) + log_prior(state, cfg)


def predict(X_new: ArrayLike, beta: ArrayLike, c: float = 0.0) -> NDArray[np.float64]:
    """Censored point prediction max(xᵀβ, c) for every row of ``X_new``."""
    X = np.asarray(X_new, dtype=float)
    if X.ndim != 2:
        raise DomainError(f"X_new must be two-dimensional, got shape {X.shape}")
    return np.maximum(_linear_predictor(X, beta), c)

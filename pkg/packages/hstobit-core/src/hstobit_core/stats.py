"""Distribution and linear-algebra primitives consumed by the Gibbs steps.

Only what the sampler needs: the standard normal CDF (and its log), a
tail-safe truncated normal, the inverse gamma and a Cholesky-based
Gaussian vector sampler. All samplers take an ``RngStream`` and are pure
functions of their arguments and the stream state.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from scipy import linalg
from scipy.special import log_ndtr, ndtr, ndtri, ndtri_exp

from .errors import DomainError, NumericError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from .rng import RngStream

# Standardized bound beyond which truncated draws switch from inverse-CDF
# to exponential-proposal rejection.
TAIL_THRESHOLD = 4.0


def _finite(x: ArrayLike, name: str) -> NDArray[np.float64]:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _unwrap(arr: NDArray[np.float64]) -> float | NDArray[np.float64]:
    return float(arr) if arr.ndim == 0 else arr


def std_normal_cdf(x: ArrayLike) -> float | NDArray[np.float64]:
    """Standard normal CDF, elementwise."""
    return _unwrap(ndtr(_finite(x, "x")))


def log_std_normal_cdf(x: ArrayLike) -> float | NDArray[np.float64]:
    """log Φ(x), finite for every finite x.

    ``scipy.special.log_ndtr`` switches to the asymptotic (Mills ratio)
    expansion deep in the lower tail, so the result never underflows to -inf.
    """
    return _unwrap(log_ndtr(_finite(x, "x")))


# ---------------------------------------------------------------------------
# Truncated normal
# ---------------------------------------------------------------------------


def _tail_draws(a: NDArray[np.float64], b: NDArray[np.float64], rng: RngStream) -> NDArray[np.float64]:
    """Standard normal draws truncated to [a, b] with a > 0 far in the tail.

    Exponential proposal with the optimal rate for wide intervals, uniform
    proposal when the interval is narrower than the exponential's scale.
    """
    gen = rng.generator
    rate = 0.5 * (a + np.sqrt(a * a + 4.0))
    narrow = (b - a) < 1.0 / rate
    out = np.empty_like(a)
    pending = np.ones(a.shape, dtype=bool)
    while np.any(pending):
        idx = np.flatnonzero(pending)
        k = idx.size
        ai, bi, ri, ni = a[idx], b[idx], rate[idx], narrow[idx]
        e = gen.standard_exponential(k)
        u = gen.random(k)
        w = gen.random(k)
        z_exp = ai + e / ri
        # inf - a is inf for one-sided bounds; narrow is False there.
        z_uni = ai + w * np.where(ni, bi - ai, 0.0)
        z = np.where(ni, z_uni, z_exp)
        log_accept = np.where(ni, -0.5 * (z * z - ai * ai), -0.5 * (z - ri) ** 2)
        ok = (np.log(u) <= log_accept) & (z <= bi)
        out[idx[ok]] = z[ok]
        pending[idx[ok]] = False
    return out


def _inverse_cdf_draws(a: NDArray[np.float64], b: NDArray[np.float64], rng: RngStream) -> NDArray[np.float64]:
    """Standard normal draws on [a, b] with a <= 0, by inverting Φ."""
    u = rng.generator.random(a.shape)
    out = np.empty_like(a)
    lower_open = np.isneginf(a)
    # (-inf, b]: invert in log space so tiny Φ(b) keeps full precision.
    if np.any(lower_open):
        log_p = np.log(u[lower_open]) + log_ndtr(b[lower_open])
        out[lower_open] = ndtri_exp(log_p)
    closed = ~lower_open
    if np.any(closed):
        pa = ndtr(a[closed])
        pb = ndtr(b[closed])
        out[closed] = ndtri(pa + u[closed] * (pb - pa))
    return np.clip(out, a, b)


def _standard_truncated(a: NDArray[np.float64], b: NDArray[np.float64], rng: RngStream) -> NDArray[np.float64]:
    out = np.empty_like(a)
    right_tail = a > TAIL_THRESHOLD
    left_tail = b < -TAIL_THRESHOLD
    body = ~(right_tail | left_tail)
    if np.any(right_tail):
        out[right_tail] = _tail_draws(a[right_tail], b[right_tail], rng)
    if np.any(left_tail):
        out[left_tail] = -_tail_draws(-b[left_tail], -a[left_tail], rng)
    if np.any(body):
        ab, bb = a[body], b[body]
        flip = ab > 0.0
        lo = np.where(flip, -bb, ab)
        hi = np.where(flip, -ab, bb)
        draws = _inverse_cdf_draws(lo, hi, rng)
        out[body] = np.where(flip, -draws, draws)
    return out


def sample_truncated_normal(
    mu: ArrayLike,
    sigma: ArrayLike,
    lower: ArrayLike,
    upper: ArrayLike,
    rng: RngStream,
    size: int | tuple[int, ...] | None = None,
) -> float | NDArray[np.float64]:
    """Draw from Normal(mu, sigma²) truncated to [lower, upper].

    Arguments broadcast against each other (and ``size`` when given).
    Bounds may be infinite. Standardized bounds beyond ``TAIL_THRESHOLD``
    use exponential-proposal rejection; everything else is inverse-CDF.
    """
    mu_a = _finite(mu, "mu")
    sigma_a = _finite(sigma, "sigma")
    lower_a = np.asarray(lower, dtype=float)
    upper_a = np.asarray(upper, dtype=float)
    if np.any(np.isnan(lower_a)) or np.any(np.isnan(upper_a)):
        raise DomainError("Truncation bounds must not be NaN")
    if np.any(sigma_a <= 0):
        raise DomainError("sigma must be positive")
    shape = np.broadcast_shapes(mu_a.shape, sigma_a.shape, lower_a.shape, upper_a.shape)
    if size is not None:
        shape = np.broadcast_shapes(shape, (size,) if isinstance(size, int) else tuple(size))
    mu_b, sigma_b, lower_b, upper_b = (np.broadcast_to(v, shape) for v in (mu_a, sigma_a, lower_a, upper_a))
    if np.any(lower_b >= upper_b):
        raise DomainError("lower bound must be strictly below upper bound")

    a = np.atleast_1d((lower_b - mu_b) / sigma_b).astype(float)
    b = np.atleast_1d((upper_b - mu_b) / sigma_b).astype(float)
    z = _standard_truncated(a.ravel(), b.ravel(), rng).reshape(a.shape)
    draws = np.clip(np.atleast_1d(mu_b) + np.atleast_1d(sigma_b) * z, np.atleast_1d(lower_b), np.atleast_1d(upper_b))
    return float(draws[0]) if shape == () else draws


# ---------------------------------------------------------------------------
# Inverse gamma
# ---------------------------------------------------------------------------


def sample_inverse_gamma(
    shape: ArrayLike,
    scale: ArrayLike,
    rng: RngStream,
    size: int | tuple[int, ...] | None = None,
) -> float | NDArray[np.float64]:
    """Draw from Inv-Gamma(shape, scale), density ∝ x^(-shape-1) exp(-scale/x).

    Drawn as ``scale / G`` with ``G ~ Gamma(shape, 1)``.
    """
    shape_a = _finite(shape, "shape")
    scale_a = _finite(scale, "scale")
    if np.any(shape_a <= 0) or np.any(scale_a <= 0):
        raise DomainError("Inverse-gamma shape and scale must be positive")
    out_shape = np.broadcast_shapes(shape_a.shape, scale_a.shape)
    if size is not None:
        out_shape = np.broadcast_shapes(out_shape, (size,) if isinstance(size, int) else tuple(size))
    g = rng.generator.standard_gamma(np.broadcast_to(shape_a, out_shape), size=out_shape)
    draws = np.broadcast_to(scale_a, out_shape) / g
    return _unwrap(np.asarray(draws, dtype=float))


# ---------------------------------------------------------------------------
# Gaussian vectors
# ---------------------------------------------------------------------------


def cholesky_lower(matrix: ArrayLike) -> NDArray[np.float64]:
    """Lower Cholesky factor; raises NumericError naming the failing pivot."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"Expected a square matrix, got shape {m.shape}")
    factor, info = linalg.lapack.dpotrf(m, lower=1, clean=1)
    if info > 0:
        raise NumericError("matrix is not positive definite", pivot=int(info) - 1)
    if info < 0:
        raise DomainError(f"Invalid argument {-info} passed to the Cholesky routine")
    return factor


def cholesky_solve(factor: NDArray[np.float64], rhs: ArrayLike) -> NDArray[np.float64]:
    """Solve ``A x = rhs`` given the lower Cholesky factor of A."""
    return linalg.cho_solve((factor, True), np.asarray(rhs, dtype=float), check_finite=False)


def sample_gaussian_vector(
    mean: ArrayLike,
    covariance: ArrayLike,
    rng: RngStream,
    size: int | None = None,
) -> NDArray[np.float64]:
    """Draw from Normal(mean, covariance) through its lower Cholesky factor.

    Returns shape ``(p,)``, or ``(size, p)`` when ``size`` is given.
    """
    mean_a = _finite(mean, "mean")
    cov = _finite(covariance, "covariance")
    p = mean_a.shape[0] if mean_a.ndim == 1 else -1
    if mean_a.ndim != 1 or cov.shape != (p, p):
        raise DomainError(f"mean {mean_a.shape} and covariance {cov.shape} do not agree")
    if not np.allclose(cov, cov.T, rtol=1e-12, atol=1e-12):
        raise DomainError("covariance must be symmetric")
    factor = cholesky_lower(cov)
    if size is None:
        return mean_a + factor @ rng.generator.standard_normal(p)
    return mean_a + rng.generator.standard_normal((size, p)) @ factor.T

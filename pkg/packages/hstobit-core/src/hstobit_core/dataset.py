"""The left-censored regression dataset."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .errors import DomainError, SchemaError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

# Column names taken by the per-draw columns of a samples table.
RESERVED_FEATURE_NAMES = ("iteration", "sigma2", "tau2")


def censoring_indicators(y: ArrayLike, c: float) -> NDArray[np.int8]:
    """d_i = 1 iff y_i > c. A response sitting exactly at c is censored."""
    y_a = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y_a)) or not np.isfinite(c):
        raise DomainError("Responses and threshold must be finite")
    return (y_a > c).astype(np.int8)


def _frozen(arr: NDArray) -> NDArray:
    out = np.array(arr, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TobitDataset:
    """Design matrix ``X`` (n × p), responses ``y`` and threshold ``c``.

    ``d`` is derived from ``(y, c)`` on construction. ``scales`` is set when
    the predictors were rescaled by :meth:`standardized`; coefficients fitted
    on the rescaled design map back as ``beta / scales``.
    """

    X: NDArray[np.float64]
    y: NDArray[np.float64]
    c: float = 0.0
    feature_names: tuple[str, ...] = ()
    scales: NDArray[np.float64] | None = None
    d: NDArray[np.int8] = field(init=False)

    def __post_init__(self) -> None:
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2:
            raise DomainError(f"X must be two-dimensional, got shape {X.shape}")
        n, p = X.shape
        if n < 1 or p < 1:
            raise DomainError(f"Dataset needs n >= 1 and p >= 1, got n={n}, p={p}")
        if y.shape != (n,):
            raise DomainError(f"y has shape {y.shape}, expected ({n},)")
        if not np.all(np.isfinite(X)):
            raise DomainError("X contains non-finite entries")
        c = float(self.c)
        d = censoring_indicators(y, c)
        below = np.flatnonzero(y < c)
        if below.size:
            raise DomainError(
                f"{below.size} responses fall below the censoring threshold {c} (first at index {below[0]})"
            )
        names = tuple(self.feature_names) or tuple(f"x{j + 1}" for j in range(p))
        if len(names) != p:
            raise DomainError(f"Got {len(names)} feature names for {p} columns")
        clashes = [name for name in names if name in RESERVED_FEATURE_NAMES]
        if clashes:
            raise SchemaError(f"Feature names {clashes} are reserved for sampler output; rename those columns")
        if len(set(names)) != p:
            raise SchemaError("Feature names must be unique")
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "y", _frozen(y))
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "d", _frozen(d))
        if self.scales is not None:
            object.__setattr__(self, "scales", _frozen(np.asarray(self.scales, dtype=float)))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def censored(self) -> NDArray[np.bool_]:
        return self.d == 0

    @property
    def censored_fraction(self) -> float:
        return float(np.mean(self.censored))

    def subset(self, rows: ArrayLike) -> TobitDataset:
        """Rows ``rows`` of this dataset, keeping threshold, names and scales."""
        idx = np.asarray(rows, dtype=int)
        return TobitDataset(self.X[idx], self.y[idx], self.c, self.feature_names, self.scales)

    def standardized(self) -> TobitDataset:
        """Rescale every predictor column to unit sample SD.

        Columns are not centred: no intercept is added implicitly, so
        centring would change the model. Constant columns keep scale 1.
        """
        if self.scales is not None:
            return self
        sd = self.X.std(axis=0, ddof=1) if self.n > 1 else np.ones(self.p)
        scales = np.where(sd > 0, sd, 1.0)
        return TobitDataset(self.X / scales, self.y, self.c, self.feature_names, scales)

    def to_original_scale(self, beta: ArrayLike) -> NDArray[np.float64]:
        """Map coefficients fitted on this design back to the unscaled predictors."""
        b = np.asarray(beta, dtype=float)
        return b if self.scales is None else b / self.scales

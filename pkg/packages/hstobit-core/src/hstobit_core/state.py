"""One full Gibbs state of the augmented Horseshoe Tobit posterior."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import numpy as np

from .errors import DomainError

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from .config import ModelConfig
    from .dataset import TobitDataset

# Offset below the threshold for the starting value of censored latents.
CENSORED_START_OFFSET = 0.5


@dataclass
class HorseshoeState:
    """Latent responses ``z``, coefficients ``beta`` and all scale parameters.

    ``lambda2``/``nu`` are the per-coefficient local scale and its auxiliary,
    ``tau2``/``xi`` the global scale and its auxiliary. The prior covariance
    of ``beta`` is ``D = tau2 * diag(lambda2)``.
    """

    z: NDArray[np.float64]
    beta: NDArray[np.float64]
    lambda2: NDArray[np.float64]
    nu: NDArray[np.float64]
    tau2: float
    xi: float
    sigma2: float

    @classmethod
    def initial(cls, data: TobitDataset, cfg: ModelConfig) -> HorseshoeState:
        """Starting point: beta = 0, unit scales, z = y (censored: c - 0.5)."""
        p = data.p
        z = np.where(data.censored, data.c - CENSORED_START_OFFSET, data.y)
        return cls(
            z=z.astype(float),
            beta=np.zeros(p),
            lambda2=np.ones(p),
            nu=np.ones(p),
            tau2=1.0,
            xi=1.0,
            sigma2=cfg.sigma2_fixed if cfg.sigma2_fixed is not None else 1.0,
        )

    @property
    def prior_variances(self) -> NDArray[np.float64]:
        """Diagonal of D = tau2 * Lambda."""
        return self.tau2 * self.lambda2

    def copy(self) -> HorseshoeState:
        return replace(
            self,
            z=self.z.copy(),
            beta=self.beta.copy(),
            lambda2=self.lambda2.copy(),
            nu=self.nu.copy(),
        )

    def check(self, data: TobitDataset) -> None:
        """Raise DomainError unless the state satisfies the support constraints."""
        if self.z.shape != (data.n,) or self.beta.shape != (data.p,):
            raise DomainError("State dimensions do not match the dataset")
        if self.lambda2.shape != (data.p,) or self.nu.shape != (data.p,):
            raise DomainError("Local scale vectors do not match the dataset")
        uncensored = ~data.censored
        if not np.array_equal(self.z[uncensored], data.y[uncensored]):
            raise DomainError("Latent z must equal y on uncensored observations")
        if np.any(self.z[data.censored] > data.c):
            raise DomainError("Latent z must not exceed c on censored observations")
        scales = np.concatenate([self.lambda2, self.nu, [self.tau2, self.xi, self.sigma2]])
        if not np.all(np.isfinite(scales)) or np.any(scales <= 0):
            raise DomainError("Scale parameters must be strictly positive and finite")

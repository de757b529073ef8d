"""Repeated random train/test splits of one observed dataset."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd
from hstobit_core.errors import DomainError
from hstobit_core.likelihood import predict
from hstobit_core.rng import RngStream

from .chain import run_chain

if TYPE_CHECKING:
    from hstobit_core.config import FitConfig
    from hstobit_core.dataset import TobitDataset

logger = logging.getLogger(__name__)

PARTITION_STREAM = 0
CHAIN_STREAM = 1


@dataclass(frozen=True)
class SplitEvaluation:
    """Per-split training and test errors, plus their mean and SD."""

    splits: pd.DataFrame

    def summary_frame(self) -> pd.DataFrame:
        rows = []
        for name in ("l2_y", "l2_ytest"):
            values = self.splits[name].to_numpy()
            sd = float(values.std(ddof=1)) if values.size > 1 else 0.0
            rows.append({"metric": name, "mean": float(values.mean()), "sd": sd, "n_splits": int(values.size)})
        return pd.DataFrame(rows)


def train_size(n: int, train_fraction: float) -> int:
    """round(n · fraction), kept inside [1, n - 1]."""
    if n < 2:
        raise DomainError(f"Need at least 2 rows to split, got {n}")
    return min(max(int(round(n * train_fraction)), 1), n - 1)


def evaluate_splits(
    data: TobitDataset,
    cfg: FitConfig,
    train_fraction: float = 0.7,
    n_splits: int = 100,
    seed: int = 0,
) -> SplitEvaluation:
    """Fit on a random training part, score censored predictions on the rest.

    Split k partitions rows with ``RngStream(seed).substream(k, 0)`` and runs
    its chain on ``substream(k, 1)``. With ``cfg.standardize`` the scales are
    estimated on the training rows only.
    """
    if not 0 < train_fraction < 1:
        raise DomainError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if n_splits < 1:
        raise DomainError(f"n_splits must be positive, got {n_splits}")
    n_train = train_size(data.n, train_fraction)
    base = RngStream(seed)
    rows = []
    for k in range(n_splits):
        order = base.substream(k, PARTITION_STREAM).generator.permutation(data.n)
        train, test = data.subset(np.sort(order[:n_train])), data.subset(np.sort(order[n_train:]))
        fit_data = train.standardized() if cfg.standardize else train
        samples = run_chain(fit_data, cfg.chain, base.substream(k, CHAIN_STREAM))
        beta_hat = fit_data.to_original_scale(samples.beta_hat())
        rows.append(
            {
                "split": k,
                "n_train": train.n,
                "n_test": test.n,
                "l2_y": float(np.mean((train.y - predict(train.X, beta_hat, data.c)) ** 2)),
                "l2_ytest": float(np.mean((test.y - predict(test.X, beta_hat, data.c)) ** 2)),
            }
        )
        logger.debug("Split %d: l2_ytest=%.4f", k, rows[-1]["l2_ytest"])
    return SplitEvaluation(pd.DataFrame(rows))

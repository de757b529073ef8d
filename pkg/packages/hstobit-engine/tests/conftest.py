"""Shared fixtures for engine tests."""

from __future__ import annotations

import numpy as np
import pytest
from hstobit_core import ChainConfig, ModelConfig, RngStream, SimulationScenario, TobitDataset


def make_tobit_data(n: int, beta: np.ndarray, seed: int = 0, c: float = 0.0, noise_sd: float = 1.0) -> TobitDataset:
    """Gaussian design, y = max(Xβ + ε, c)."""
    gen = RngStream(seed).generator
    X = gen.standard_normal((n, beta.size))
    latent = X @ beta + noise_sd * gen.standard_normal(n)
    return TobitDataset(X=X, y=np.maximum(latent, c), c=c)


def write_dataset_csv(path, data: TobitDataset, response: str = "y"):
    header = ",".join([response, *data.feature_names])
    lines = [header] + [",".join(repr(float(v)) for v in (yi, *row)) for yi, row in zip(data.y, data.X)]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def rng() -> RngStream:
    return RngStream(2024)


@pytest.fixture
def sparse_data() -> TobitDataset:
    """n = 100, p = 8, two signals, roughly a third of responses censored at 0."""
    beta = np.array([2.0, -1.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    return make_tobit_data(100, beta, seed=11)


@pytest.fixture
def model_cfg() -> ModelConfig:
    return ModelConfig()


@pytest.fixture
def short_chain() -> ChainConfig:
    return ChainConfig(n_iter=200, burn_in=100, seed=3)


@pytest.fixture
def smoke_scenario() -> SimulationScenario:
    return SimulationScenario(
        name="smoke",
        n=30,
        p=12,
        s_star=3,
        rho_x=0.5,
        n_test=10,
        n_reps=3,
        base_seed=7,
        chain=ChainConfig(n_iter=120, burn_in=40),
    )


@pytest.fixture
def dataset_csv(tmp_path, sparse_data):
    return write_dataset_csv(tmp_path / "data.csv", sparse_data)

"""Shared fixtures for core tests."""

from __future__ import annotations

import numpy as np
import pytest
from hstobit_core import ModelConfig, RngStream, TobitDataset


@pytest.fixture
def rng() -> RngStream:
    return RngStream(12345)


@pytest.fixture
def small_data() -> TobitDataset:
    """Six rows, two predictors, two censored responses at c = 0."""
    X = np.array(
        [
            [1.0, 0.5],
            [-0.3, 1.2],
            [0.8, -1.0],
            [-1.5, 0.1],
            [0.2, 0.9],
            [1.1, -0.4],
        ]
    )
    y = np.array([1.3, 0.0, 0.4, 0.0, 2.1, 0.7])
    return TobitDataset(X=X, y=y, c=0.0)


@pytest.fixture
def model_cfg() -> ModelConfig:
    return ModelConfig()


@pytest.fixture
def csv_file(tmp_path):
    """Write ``text`` to a CSV file inside tmp_path and return its path."""

    def _write(text: str, name: str = "data.csv"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write

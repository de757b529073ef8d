"""Configuration models: tempering/prior settings, chain settings, scenarios.

Field-level validation is handled by pydantic; cross-field invariants are
``model_validator`` checks. File-backed configs forbid unknown keys so a
typo in a scenario file fails loudly instead of silently using a default.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Literal

if sys.version_info >= (3, 11):
    from enum import StrEnum
    from typing import Self
else:
    from enum import Enum

    from typing_extensions import Self

    class StrEnum(str, Enum):
        """Backport of :class:`enum.StrEnum` for Python < 3.11."""

        def __str__(self) -> str:
            return str.__str__(self)

from pydantic import BaseModel, ConfigDict, Field, model_validator

MAX_SEED = 2**64 - 1


class ModelConfig(BaseModel):
    """Tempering exponent and σ² prior.

    ``sigma2_fixed`` holds σ² at the given value instead of sampling it.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    alpha: float = Field(0.99, gt=0.0, le=1.0)
    a0: float = Field(1.0, gt=0.0)
    b0: float = Field(1.0, gt=0.0)
    sigma2_fixed: float | None = Field(None, gt=0.0)


class ChainConfig(BaseModel):
    """Length, thinning and seeding of one Gibbs chain.

    ``sampler`` picks the β-update algorithm; ``auto`` uses the O(n²p)
    auxiliary-variable path when ``p > auxiliary_ratio * n``.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_iter: int = Field(1200, gt=0)
    burn_in: int = Field(500, ge=0)
    thin: int = Field(1, ge=1)
    model: ModelConfig = Field(default_factory=ModelConfig)
    seed: int = Field(0, ge=0, le=MAX_SEED)
    store_hyperparams: bool = False
    sampler: Literal["auto", "direct", "auxiliary"] = "auto"
    auxiliary_ratio: float = Field(2.0, gt=0.0)

    @model_validator(mode="after")
    def check_burn_in(self) -> Self:
        if self.burn_in >= self.n_iter:
            raise ValueError(f"burn_in ({self.burn_in}) must be smaller than n_iter ({self.n_iter})")
        return self

    @property
    def kept(self) -> int:
        """Number of retained draws: floor((n_iter - burn_in) / thin)."""
        return (self.n_iter - self.burn_in) // self.thin


class NoiseFamily(StrEnum):
    GAUSSIAN = "gaussian"
    STUDENT_T3 = "student_t3"


class ImportedMethod(BaseModel):
    """Coefficients fitted elsewhere, one CSV row per replicate."""

    model_config = ConfigDict(extra="forbid")

    label: str
    coefficients_csv: Path


class SimulationScenario(BaseModel):
    """One simulation setting: design, truth, noise, censoring and replication."""

    model_config = ConfigDict(extra="forbid")

    name: str = "scenario"
    n: int = Field(gt=0)
    p: int = Field(gt=0)
    s_star: int = Field(ge=0)
    rho_x: float = Field(0.0, ge=0.0, lt=1.0)
    noise: NoiseFamily = NoiseFamily.GAUSSIAN
    c: float = 0.0
    n_test: int = Field(30, gt=0)
    n_reps: int = Field(100, gt=0)
    base_seed: int = Field(0, ge=0, le=MAX_SEED)
    beta_error_scale: float = Field(1.0, gt=0.0)
    standardize: bool = False
    chain: ChainConfig = Field(default_factory=ChainConfig)
    methods: list[ImportedMethod] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_sparsity(self) -> Self:
        if self.s_star > self.p:
            raise ValueError(f"s_star ({self.s_star}) cannot exceed p ({self.p})")
        return self


class Study(BaseModel):
    """Several scenarios run back to back into one table."""

    model_config = ConfigDict(extra="forbid")

    scenarios: list[SimulationScenario] = Field(min_length=1)


class FitConfig(BaseModel):
    """Settings for fitting one CSV dataset."""

    model_config = ConfigDict(extra="forbid")

    response: str = "y"
    c: float = 0.0
    standardize: bool = False
    chain: ChainConfig = Field(default_factory=ChainConfig)


class EvaluateConfig(FitConfig):
    """Repeated random train/test splits of one CSV dataset."""

    train_fraction: float = Field(0.7, gt=0.0, lt=1.0)
    n_splits: int = Field(100, gt=0)
    split_seed: int = Field(0, ge=0, le=MAX_SEED)

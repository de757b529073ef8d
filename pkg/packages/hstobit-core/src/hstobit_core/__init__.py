"""hstobit core: data model and numerical primitives for Horseshoe Tobit regression."""

from .config import (
    ChainConfig,
    EvaluateConfig,
    FitConfig,
    ImportedMethod,
    ModelConfig,
    NoiseFamily,
    SimulationScenario,
    Study,
)
from .dataset import TobitDataset, censoring_indicators
from .errors import (
    ConfigError,
    DomainError,
    HstobitError,
    IngestionError,
    NumericError,
    SchemaError,
)
from .io import dump_config, load_config, read_dataset_csv, read_numeric_csv
from .likelihood import (
    augmented_tempered_log_likelihood,
    fractional_log_posterior_kernel,
    log_prior,
    predict,
    tobit_log_likelihood,
)
from .rng import PRNG_ALGORITHM, RngStream
from .state import HorseshoeState
from .stats import (
    log_std_normal_cdf,
    sample_gaussian_vector,
    sample_inverse_gamma,
    sample_truncated_normal,
    std_normal_cdf,
)

__version__ = "0.1.0"

__all__ = [
    "PRNG_ALGORITHM",
    "ChainConfig",
    "ConfigError",
    "DomainError",
    "EvaluateConfig",
    "FitConfig",
    "HorseshoeState",
    "HstobitError",
    "ImportedMethod",
    "IngestionError",
    "ModelConfig",
    "NoiseFamily",
    "NumericError",
    "RngStream",
    "SchemaError",
    "SimulationScenario",
    "Study",
    "TobitDataset",
    "augmented_tempered_log_likelihood",
    "censoring_indicators",
    "dump_config",
    "fractional_log_posterior_kernel",
    "load_config",
    "log_prior",
    "log_std_normal_cdf",
    "predict",
    "read_dataset_csv",
    "read_numeric_csv",
    "sample_gaussian_vector",
    "sample_inverse_gamma",
    "sample_truncated_normal",
    "std_normal_cdf",
    "tobit_log_likelihood",
]

"""hstobit engine: Gibbs sampler, diagnostics and simulation harness."""

from .chain import PosteriorSamples, posterior_summary, run_chain
from .diagnostics import (
    AcfResult,
    ImportanceWeightSummary,
    acf_export,
    autocorrelation,
    effective_sample_size,
    importance_log_weights,
    importance_weight_summary,
    trace_export,
)
from .evaluation import SplitEvaluation, evaluate_splits
from .geweke import GewekeResult, GewekeSetup, geweke_joint_test
from .gibbs import (
    GibbsSampler,
    update_beta,
    update_lambda2,
    update_latent_z,
    update_nu,
    update_sigma2,
    update_tau2,
    update_xi,
)
from .simulation import (
    Metrics,
    ScenarioResult,
    ar1_covariance_factor,
    evaluation_metrics,
    generate_dataset,
    make_beta0,
    run_scenario,
    run_study,
)

__all__ = [
    "AcfResult",
    "GewekeResult",
    "GewekeSetup",
    "GibbsSampler",
    "ImportanceWeightSummary",
    "Metrics",
    "PosteriorSamples",
    "ScenarioResult",
    "SplitEvaluation",
    "acf_export",
    "ar1_covariance_factor",
    "autocorrelation",
    "effective_sample_size",
    "evaluate_splits",
    "evaluation_metrics",
    "generate_dataset",
    "geweke_joint_test",
    "importance_log_weights",
    "importance_weight_summary",
    "make_beta0",
    "posterior_summary",
    "run_chain",
    "run_scenario",
    "run_study",
    "trace_export",
    "update_beta",
    "update_lambda2",
    "update_latent_z",
    "update_nu",
    "update_sigma2",
    "update_tau2",
    "update_xi",
]

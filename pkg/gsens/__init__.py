"""
gsens: G-estimation of causal effects with instrumental variables and a
single-parameter sensitivity analysis for invalid instruments.
"""

__version__ = "0.1.0"

from .analyzers import (
    GEstimate,
    GEstimator,
    RelevanceResult,
    SweepResult,
    asymptotic_bias_linear,
    closed_form_linear,
    compose_alpha,
    default_alpha_grid,
    fit_g_estimator,
    relevance_check,
    sweep_alpha,
)
from .config import EstimateStatus, Link, RunConfig, SolverConfig
from .core import GSensError
from .data import Dataset, load_csv, save_csv
from .models import SmmSpec, build_stacked_system, fit_instrument_model, fit_outcome_model
from .simulation import (
    LinearDgpConfig,
    LogisticDgpConfig,
    MonteCarloReport,
    calibrate_linear,
    calibrate_logistic,
    generate_linear,
    generate_logistic,
    run_monte_carlo,
)

__all__ = [
    "__version__",
    "GEstimate",
    "GEstimator",
    "RelevanceResult",
    "SweepResult",
    "asymptotic_bias_linear",
    "closed_form_linear",
    "compose_alpha",
    "default_alpha_grid",
    "fit_g_estimator",
    "relevance_check",
    "sweep_alpha",
    "EstimateStatus",
    "Link",
    "RunConfig",
    "SolverConfig",
    "GSensError",
    "Dataset",
    "load_csv",
    "save_csv",
    "SmmSpec",
    "build_stacked_system",
    "fit_instrument_model",
    "fit_outcome_model",
    "LinearDgpConfig",
    "LogisticDgpConfig",
    "MonteCarloReport",
    "calibrate_linear",
    "calibrate_logistic",
    "generate_linear",
    "generate_logistic",
    "run_monte_carlo",
]

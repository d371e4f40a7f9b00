from .gestimation import (
    GEstimate,
    GEstimator,
    SweepResult,
    default_alpha_grid,
    fit_g_estimator,
    sweep_alpha,
)
from .linear import asymptotic_bias_linear, closed_form_linear, compose_alpha, ols_outcome_coefficients
from .relevance import RelevanceResult, relevance_check

__all__ = [
    "GEstimate",
    "GEstimator",
    "SweepResult",
    "default_alpha_grid",
    "fit_g_estimator",
    "sweep_alpha",
    "asymptotic_bias_linear",
    "closed_form_linear",
    "compose_alpha",
    "ols_outcome_coefficients",
    "RelevanceResult",
    "relevance_check",
]

from .dgp import (
    LinearDgpConfig,
    LogisticDgpConfig,
    calibrate,
    calibrate_linear,
    calibrate_logistic,
    generate,
    generate_linear,
    generate_logistic,
    replication_seed,
)
from .monte_carlo import MonteCarloReport, run_monte_carlo

__all__ = [
    "LinearDgpConfig",
    "LogisticDgpConfig",
    "calibrate",
    "calibrate_linear",
    "calibrate_logistic",
    "generate",
    "generate_linear",
    "generate_logistic",
    "replication_seed",
    "MonteCarloReport",
    "run_monte_carlo",
]

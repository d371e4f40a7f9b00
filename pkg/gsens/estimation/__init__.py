from .roots import RootResult, solve_scalar_root
from .sandwich import (
    SandwichCovariance,
    StackedSystem,
    bread_matrix,
    meat_matrix,
    sandwich_variance,
    wald_ci,
)

__all__ = [
    "RootResult",
    "solve_scalar_root",
    "SandwichCovariance",
    "StackedSystem",
    "bread_matrix",
    "meat_matrix",
    "sandwich_variance",
    "wald_ci",
]

"""Closed-form results for the linear (identity-link) structural mean model."""

import logging
from typing import Tuple

import numpy as np
from scipy.linalg import lstsq

from ..core import UnsupportedCombinationError, WeakInstrumentError
from ..data import Dataset

logger = logging.getLogger(__name__)

WEAK_INSTRUMENT_TOL = 1e-12


def _covariance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.mean((a - a.mean()) * (b - b.mean())))


def closed_form_linear(data: Dataset, alpha: float) -> float:
    """
    psi(alpha) = beta_YZ / beta_XZ - alpha / beta_XZ.

    beta_YZ = cov(Y, Z) / var(Z) og beta_XZ = cov(X, Z) / var(Z) fra
    utvalgskovarianser; for alpha = 0 er dette Wald-forholdet.

    Raises:
        WeakInstrumentError: |cov(X, Z)| < 1e-12
        UnsupportedCombinationError: Datasettet har konfundere
    """
    if data.l.shape[1]:
        raise UnsupportedCombinationError("Den lukkede formen gjelder bare uten konfundere")
    cov_xz = _covariance(data.x, data.z)
    if abs(cov_xz) < WEAK_INSTRUMENT_TOL:
        raise WeakInstrumentError(f"cov(X, Z) = {cov_xz:.3e}; instrumentet er for svakt")
    var_z = _covariance(data.z, data.z)
    beta_xz = cov_xz / var_z
    beta_yz = _covariance(data.y, data.z) / var_z
    return beta_yz / beta_xz - alpha / beta_xz


def compose_alpha(delta_direct: float, delta_confounding: float) -> float:
    """Samlet brudd alpha = delta_1 + delta_2 (direkte effekt pluss konfundering)"""
    return delta_direct + delta_confounding


def asymptotic_bias_linear(beta_yz_l: float, beta_xz_l: float) -> float:
    """
    Asymptotisk skjevhet psi_G - psi for G-estimatoren uten korreksjon.

    Raises:
        WeakInstrumentError: beta_xz_l = 0
    """
    if abs(beta_xz_l) < WEAK_INSTRUMENT_TOL:
        raise WeakInstrumentError("beta_XZ er null; skjevheten er ikke definert")
    return beta_yz_l / beta_xz_l


def ols_outcome_coefficients(data: Dataset) -> Tuple[float, float]:
    """
    Minste kvadraters koeffisienter (X, Z) i regresjonen Y ~ 1 + X + Z.

    Z-koeffisienten er den alpha som gjør G-estimatoren lik OLS-estimatet av X.
    """
    design = np.column_stack([np.ones(data.n), data.x, data.z])
    coef = lstsq(design, data.y)[0]
    return float(coef[1]), float(coef[2])

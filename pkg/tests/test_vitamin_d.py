"""
Reproduksjon av vitamin D-analysen (filaggrin som instrument, død som utfall).

Kjøres bare når GSENS_VITD_CSV peker på den eksporterte datafilen med
kolonnene id, age, filaggrin, vitd, time og death.
"""

import os

import numpy as np
import pytest

from gsens.analyzers import fit_g_estimator, relevance_check, sweep_alpha
from gsens.config import EstimateStatus, Link
from gsens.data import load_csv
from gsens.models import SmmSpec, fit_instrument_model

VITD_CSV = os.getenv("GSENS_VITD_CSV")

pytestmark = pytest.mark.skipif(not VITD_CSV, reason="GSENS_VITD_CSV er ikke satt")

COLUMNS = {"y": "death", "x": "vitd", "z": "filaggrin"}

# (alpha, psi_hat, or_hat) for griddet -0.15..0.50
SWEEP_REFERENCE = [
    (-0.15, -0.512, 0.599),
    (-0.10, -0.842, 0.431),
    (-0.05, -1.224, 0.294),
    (0.00, -1.558, 0.211),
    (0.05, -1.853, 0.157),
    (0.10, -2.121, 0.120),
    (0.15, -2.369, 0.094),
    (0.20, -2.603, 0.074),
    (0.25, -2.825, 0.059),
    (0.30, -3.040, 0.048),
    (0.35, -3.247, 0.039),
    (0.40, -3.449, 0.032),
    (0.45, -3.646, 0.026),
    (0.50, -3.840, 0.022),
]


@pytest.fixture(scope="module")
def vitd():
    return load_csv(VITD_CSV, COLUMNS, standardize_exposure=True)


def test_dataset_size_and_instrument_mean(vitd):
    assert vitd.n == 2571
    assert fit_instrument_model(vitd).mu_z == pytest.approx(vitd.z.mean(), abs=1e-15)


def test_estimate_at_zero_violation(vitd):
    estimate = fit_g_estimator(vitd, SmmSpec(link=Link.LOGIT), 0.0)
    assert estimate.psi == pytest.approx(-1.558, abs=0.005)
    assert estimate.ci[0] == pytest.approx(-4.588, abs=0.01)
    assert estimate.ci[1] == pytest.approx(1.472, abs=0.01)
    assert estimate.odds_ratio == pytest.approx(0.211, abs=0.002)


def test_sweep_boundary(vitd):
    grid = [round(-0.2 + 0.05 * k, 2) for k in range(15)]
    sweep = sweep_alpha(vitd, SmmSpec(link=Link.LOGIT), grid)
    assert sweep.entries[0].status is EstimateStatus.NO_SOLUTION
    assert sweep.entries[1].status is EstimateStatus.SOLVED
    assert fit_g_estimator(vitd, SmmSpec(link=Link.LOGIT), -0.3).status is EstimateStatus.NO_SOLUTION
    psi = np.array([e.psi for e in sweep.entries[1:]])
    assert np.all(np.isfinite(psi))


def test_sweep_reference_values(vitd):
    grid = [alpha for alpha, _, _ in SWEEP_REFERENCE]
    sweep = sweep_alpha(vitd, SmmSpec(link=Link.LOGIT), grid)
    for entry, (alpha, psi, odds_ratio) in zip(sweep.entries, SWEEP_REFERENCE):
        assert entry.status is EstimateStatus.SOLVED, alpha
        assert entry.psi == pytest.approx(psi, abs=0.01)
        assert entry.odds_ratio == pytest.approx(odds_ratio, rel=0.011, abs=0.001)


def test_instrument_relevance(vitd):
    result = relevance_check(vitd)
    assert result.f_stat == pytest.approx(7.349, abs=0.01)
    assert result.df == (1, 2569)
    assert result.coef == pytest.approx(0.273, abs=0.002)
    assert result.ci[0] == pytest.approx(0.076, abs=0.002)
    assert result.ci[1] == pytest.approx(0.471, abs=0.002)

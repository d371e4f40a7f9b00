import numpy as np
import pytest
from scipy import stats

from gsens.analyzers import relevance_check
from gsens.core import RankDeficientError
from gsens.data import Dataset


def test_f_statistic_matches_least_squares(linear_data):
    result = relevance_check(linear_data)
    n = linear_data.n
    design = np.column_stack([np.ones(n), linear_data.z])
    coef, *_ = np.linalg.lstsq(design, linear_data.x, rcond=None)
    residuals = linear_data.x - design @ coef
    sigma2 = residuals @ residuals / (n - 2)
    se = np.sqrt(sigma2 * np.linalg.inv(design.T @ design)[1, 1])

    assert result.coef == pytest.approx(coef[1], abs=1e-12)
    assert result.f_stat == pytest.approx((coef[1] / se) ** 2, rel=1e-9)
    assert result.df == (1, n - 2)
    half = stats.t.ppf(0.975, n - 2) * se
    assert result.ci[0] == pytest.approx(coef[1] - half, abs=1e-10)
    assert result.ci[1] == pytest.approx(coef[1] + half, abs=1e-10)
    assert not result.perfect_collinearity


def test_identical_exposure_and_instrument_is_flagged():
    z = np.array([0.0, 1.0, 1.0, 0.0, 1.0, 0.0])
    result = relevance_check(Dataset(y=np.zeros(6), x=z, z=z))
    assert result.perfect_collinearity
    assert np.isinf(result.f_stat)
    assert result.coef == pytest.approx(1.0)


def test_constant_instrument_is_rank_deficient():
    with pytest.raises(RankDeficientError):
        relevance_check(Dataset(y=np.zeros(4), x=np.arange(4.0), z=np.ones(4)))


def test_too_few_rows():
    with pytest.raises(ValueError):
        relevance_check(Dataset(y=[0.0, 1.0], x=[0.0, 1.0], z=[0.0, 1.0]))


def test_irrelevant_instrument_rarely_passes_at_one_percent():
    rng = np.random.default_rng(42)
    n = 10_000
    critical = stats.f.ppf(0.99, 1, n - 2)
    below = 0
    for _ in range(200):
        z = rng.binomial(1, 0.5, n).astype(float)
        x = rng.standard_normal(n)
        below += relevance_check(Dataset(y=np.zeros(n), x=x, z=z)).f_stat < critical
    assert below / 200 >= 0.95

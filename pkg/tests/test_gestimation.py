import numpy as np
import pytest
from conftest import make_linear_data

from gsens.analyzers import (
    GEstimator,
    asymptotic_bias_linear,
    closed_form_linear,
    compose_alpha,
    default_alpha_grid,
    fit_g_estimator,
    ols_outcome_coefficients,
    sweep_alpha,
)
from gsens.config import EstimateStatus, Link, SolverConfig
from gsens.core import DomainError, UnsupportedCombinationError, WeakInstrumentError
from gsens.data import Dataset
from gsens.models import SmmSpec


def covariance(a, b):
    return np.mean((a - a.mean()) * (b - b.mean()))


def test_identity_fit_matches_closed_form_on_many_datasets():
    for seed in range(50):
        data = make_linear_data(n=500, seed=seed)
        estimator = GEstimator(data, SmmSpec())
        for alpha in (-0.4, -0.1, 0.0, 0.25, 0.6):
            estimate = estimator.fit(alpha)
            assert estimate.solved
            assert abs(estimate.psi - closed_form_linear(data, alpha)) <= 1e-8


def test_closed_form_is_covariance_ratio(linear_data):
    data = linear_data
    beta_xz = covariance(data.x, data.z) / covariance(data.z, data.z)
    beta_yz = covariance(data.y, data.z) / covariance(data.z, data.z)
    assert closed_form_linear(data, 0.3) == pytest.approx(beta_yz / beta_xz - 0.3 / beta_xz, abs=1e-12)
    assert closed_form_linear(data, 0.0) == pytest.approx(
        covariance(data.y, data.z) / covariance(data.x, data.z), abs=1e-12
    )


def test_closed_form_when_everything_is_the_instrument():
    z = np.array([0.0, 1.0, 1.0, 0.0, 1.0])
    assert closed_form_linear(Dataset(y=z, x=z, z=z), 0.0) == pytest.approx(1.0)


def test_closed_form_rejects_weak_instrument():
    z = np.array([0.0, 1.0, 0.0, 1.0])
    x = np.array([1.0, 1.0, 0.0, 0.0])
    with pytest.raises(WeakInstrumentError):
        closed_form_linear(Dataset(y=np.arange(4.0), x=x, z=z), 0.0)


def test_closed_form_requires_no_covariates():
    data = make_linear_data(covariate=True)
    with pytest.raises(UnsupportedCombinationError):
        closed_form_linear(data, 0.0)


def test_solved_estimate_is_well_formed(linear_data):
    estimate = fit_g_estimator(linear_data, SmmSpec(), 0.2)
    assert estimate.status is EstimateStatus.SOLVED
    assert estimate.diagnostics["system_residual"] <= 1e-8
    assert estimate.ci[0] <= estimate.psi <= estimate.ci[1]
    assert estimate.std_error > 0
    assert estimate.theta[-1] == estimate.psi
    assert not estimate.diagnostics["multiple_roots"]


def test_root_outside_bracket_is_no_solution(linear_data):
    beta_xz = covariance(linear_data.x, linear_data.z) / covariance(linear_data.z, linear_data.z)
    # psi(alpha) = psi(0) - alpha / beta_XZ; velg alpha slik at psi havner langt utenfor [-10, 10]
    alpha = 30.0 * beta_xz
    estimate = fit_g_estimator(linear_data, SmmSpec(), alpha)
    assert estimate.status is EstimateStatus.NO_SOLUTION
    assert np.isnan(estimate.psi)
    assert np.isnan(estimate.ci[0])


def test_wider_bracket_recovers_the_solution(linear_data):
    beta_xz = covariance(linear_data.x, linear_data.z) / covariance(linear_data.z, linear_data.z)
    alpha = 30.0 * beta_xz
    solver = SolverConfig(bracket=(-100.0, 100.0), scan_points=1001)
    estimate = fit_g_estimator(linear_data, SmmSpec(), alpha, solver)
    assert estimate.solved
    assert estimate.psi == pytest.approx(closed_form_linear(linear_data, alpha), abs=1e-8)


def test_singleton_sweep_equals_single_fit(linear_data):
    single = fit_g_estimator(linear_data, SmmSpec(), 0.0)
    sweep = sweep_alpha(linear_data, SmmSpec(), [0.0])
    assert sweep.entries[0].psi == single.psi
    assert sweep.entries[0].ci == single.ci
    assert sweep.solvable_range == (0.0, 0.0)


def test_identity_sweep_is_affine_in_alpha(linear_data):
    grid = default_alpha_grid(0.0, 0.2, 0.02)
    sweep = sweep_alpha(linear_data, SmmSpec(), grid)
    beta_xz = covariance(linear_data.x, linear_data.z) / covariance(linear_data.z, linear_data.z)
    psi = np.array([e.psi for e in sweep.entries])
    expected = psi[10] - (np.array(grid) - grid[10]) / beta_xz
    assert np.max(np.abs(psi - expected)) <= 1e-8


def test_concurrent_sweep_is_bit_identical_to_serial(logistic_data):
    spec = SmmSpec(link=Link.LOGIT)
    grid = default_alpha_grid(0.0, 0.1, 0.02)
    serial = sweep_alpha(logistic_data, spec, grid, warm_start=False)
    concurrent = sweep_alpha(logistic_data, spec, grid, workers=4)
    for a, b in zip(serial.entries, concurrent.entries):
        assert a.psi == b.psi
        assert a.ci == b.ci
        assert a.status is b.status


def test_warm_start_agrees_with_full_scan(logistic_data):
    spec = SmmSpec(link=Link.LOGIT)
    grid = default_alpha_grid(0.0, 0.1, 0.02)
    warm = sweep_alpha(logistic_data, spec, grid, warm_start=True)
    cold = sweep_alpha(logistic_data, spec, grid, warm_start=False)
    for a, b in zip(warm.entries, cold.entries):
        assert a.psi == pytest.approx(b.psi, abs=1e-10)


def test_warm_start_with_several_roots_rescans_full_bracket(linear_data):
    estimator = GEstimator(linear_data, SmmSpec())
    estimator.estimating_function = lambda alpha: lambda psi: (psi + 0.13) * (psi - 1.23) * (psi - 1.77)

    estimate = estimator.fit(0.0, start=1.5)
    assert estimate.psi == pytest.approx(-0.13, abs=1e-8)
    assert estimate.diagnostics["multiplicity"] == 3
    assert not estimate.diagnostics["warm_start"]
    assert estimate.diagnostics["bracket"] == (-10.0, 10.0)


def test_warm_start_keeps_single_root_in_window(linear_data):
    estimator = GEstimator(linear_data, SmmSpec())
    estimator.estimating_function = lambda alpha: lambda psi: (psi + 0.13) * (psi - 1.23)

    estimate = estimator.fit(0.0, start=1.5)
    assert estimate.psi == pytest.approx(1.23, abs=1e-8)
    assert estimate.diagnostics["warm_start"]
    assert estimator.fit(0.0).psi == pytest.approx(-0.13, abs=1e-8)


def test_sweep_rejects_unordered_grid(linear_data):
    with pytest.raises(ValueError):
        sweep_alpha(linear_data, SmmSpec(), [0.1, 0.0])
    with pytest.raises(ValueError):
        sweep_alpha(linear_data, SmmSpec(), [])


def test_default_grid():
    grid = default_alpha_grid()
    assert len(grid) == 21
    assert grid[0] == pytest.approx(-0.2)
    assert grid[-1] == pytest.approx(0.2)
    assert grid[10] == 0.0
    shifted = default_alpha_grid(center=0.5)
    assert shifted[0] == pytest.approx(0.3)
    assert shifted[-1] == pytest.approx(0.7)


def test_sweep_summaries(linear_data):
    beta_xz = covariance(linear_data.x, linear_data.z) / covariance(linear_data.z, linear_data.z)
    boundary = 30.0 * beta_xz
    sweep = sweep_alpha(linear_data, SmmSpec(), [-0.1, 0.0, 0.1, boundary])
    assert sweep.entries[-1].status is EstimateStatus.NO_SOLUTION
    assert sweep.solvable_range == (-0.1, 0.1)

    bounds = sweep.psi_bounds()
    solved = sweep.solved_entries
    assert bounds["psi_min"] == min(e.psi for e in solved)
    assert bounds["ci_hi"] == max(e.ci[1] for e in solved)
    assert sweep.sign_stable == (len({np.sign(e.psi) for e in solved}) == 1)

    frame = sweep.to_frame()
    assert list(frame.columns) == ["alpha", "psi_hat", "ci_lo", "ci_hi", "status"]
    assert frame["status"].tolist()[-1] == "no_solution"


def test_logistic_fit_and_odds_ratio(logistic_data):
    estimate = fit_g_estimator(logistic_data, SmmSpec(link=Link.LOGIT), 0.0)
    assert estimate.solved
    assert len(estimate.theta) == 6
    assert estimate.odds_ratio == pytest.approx(np.exp(estimate.psi))
    lo, hi = estimate.odds_ratio_ci
    assert lo == pytest.approx(np.exp(estimate.ci[0]))
    assert lo < estimate.odds_ratio < hi
    assert set(estimate.to_record()) == {"alpha", "psi_hat", "ci_lo", "ci_hi", "or_hat", "or_lo", "or_hi", "status"}


def test_logistic_fit_rejects_continuous_outcome(linear_data):
    with pytest.raises(DomainError):
        fit_g_estimator(linear_data, SmmSpec(link=Link.LOGIT), 0.0)


def test_log_link_fit_on_positive_outcome():
    rng = np.random.default_rng(4)
    z = rng.binomial(1, 0.5, 20000).astype(float)
    x = rng.binomial(1, 0.3 + 0.4 * z).astype(float)
    y = rng.poisson(np.exp(0.2 + 0.5 * x)).astype(float)
    estimate = fit_g_estimator(Dataset(y=y, x=x, z=z), SmmSpec(link=Link.LOG), 0.0)
    assert estimate.solved
    assert estimate.psi == pytest.approx(0.5, abs=0.2)


def test_alpha_corrected_estimate_equals_least_squares():
    # Ingen uobservert konfundering: OLS av Y på (X, Z) er konsistent
    rng = np.random.default_rng(9)
    n = 2000
    z = rng.binomial(1, 0.5, n).astype(float)
    x = rng.binomial(1, 0.25 + 0.5 * z).astype(float)
    y = 1.0 + 0.7 * x + 0.4 * z + rng.standard_normal(n)
    data = Dataset(y=y, x=x, z=z)
    coef_x, coef_z = ols_outcome_coefficients(data)
    estimate = fit_g_estimator(data, SmmSpec(), coef_z)
    assert estimate.psi == pytest.approx(coef_x, abs=1e-6)


def test_joint_psi_alpha_system_is_not_identified():
    # To D-funksjoner for binær Z: D2 = Z^2 - E[Z^2] er lik D1, så systemet i
    # (psi, alpha) er singulært
    data = make_linear_data(n=5000, seed=2, alpha=0.0)
    d1 = data.z - data.z.mean()
    d2 = data.z ** 2 - np.mean(data.z ** 2)
    coefficients = np.array([
        [np.mean(d1 * data.x), np.mean(d1 * data.z)],
        [np.mean(d2 * data.x), np.mean(d2 * data.z)],
    ])
    assert np.linalg.cond(coefficients) > 1e8


def test_compose_alpha():
    assert compose_alpha(0.0, 0.0) == 0.0
    assert compose_alpha(0.3, 0.2) == pytest.approx(0.5)
    assert compose_alpha(0.3, -0.7) == compose_alpha(-0.7, 0.3)


def test_asymptotic_bias():
    assert asymptotic_bias_linear(0.0, 3.0) == 0.0
    assert asymptotic_bias_linear(0.5, 0.25) == pytest.approx(2.0)
    with pytest.raises(WeakInstrumentError):
        asymptotic_bias_linear(0.5, 0.0)


def test_covariate_adjusted_instrument_model_runs():
    data = make_linear_data(n=1500, seed=6, covariate=True)
    spec = SmmSpec(instrument_formula=("intercept", "l0"))
    estimate = fit_g_estimator(data, spec, 0.3)
    assert estimate.solved
    assert estimate.theta.shape == (3,)

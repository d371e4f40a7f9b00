"""
Calibrated data-generating processes for the simulation study.

Z ~ Bernoulli(p_z), X | Z ~ Bernoulli(expit(gamma_0 + gamma_z Z)) and Y | X, Z
normal (linear) or Bernoulli (logistic) with mean
g^-1(beta_0 + beta_x X + beta_z Z + beta_xz X Z). beta_xz (and beta_0 for the
logistic case) are solved so the true violation equals alpha_star.
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.optimize import least_squares, root
from scipy.special import expit, logit

from ..config import Link, SimulationConfig
from ..core import NoConvergenceError, UnreachableError
from ..data import Dataset

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence]


def _solve_gamma_z(p_z: float, p_x: float, gamma_0: float) -> float:
    """gamma_z fra p_x = (1 - p_z) expit(gamma_0) + p_z expit(gamma_0 + gamma_z)"""
    for name, p in (("p_z", p_z), ("p_x", p_x)):
        if not 0.0 < p < 1.0:
            raise UnreachableError(f"{name} må ligge i (0, 1), fikk {p}")
    e1 = (p_x - (1.0 - p_z) * expit(gamma_0)) / p_z
    if not 0.0 < e1 < 1.0:
        raise UnreachableError(
            f"p_x={p_x} kan ikke nås med gamma_0={gamma_0}, p_z={p_z} (krever expit-verdi {e1:.4f})"
        )
    return float(logit(e1) - gamma_0)


@dataclass(frozen=True)
class LinearDgpConfig:
    psi: float
    alpha_star: float
    p_z: float
    gamma_0: float
    gamma_z: float
    beta_0: float
    beta_x: float
    beta_z: float
    beta_xz: float
    sigma: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.p_z < 1.0:
            raise ValueError(f"p_z må ligge i (0, 1), fikk {self.p_z}")
        if self.sigma <= 0:
            raise ValueError(f"sigma må være positiv, fikk {self.sigma}")

    @property
    def link(self) -> Link:
        return Link.IDENTITY

    def exposure_probabilities(self) -> Tuple[float, float]:
        """(P(X=1 | Z=0), P(X=1 | Z=1))"""
        return float(expit(self.gamma_0)), float(expit(self.gamma_0 + self.gamma_z))

    def implied_alpha(self) -> float:
        """E[Y_0 | Z=1] - E[Y_0 | Z=0] under modellen"""
        e0, e1 = self.exposure_probabilities()
        b0, bx, bz, bxz, psi = self.beta_0, self.beta_x, self.beta_z, self.beta_xz, self.psi
        return (
            (b0 + bz) * (1 - e1) + (b0 + bx + bz + bxz - psi) * e1
            - b0 * (1 - e0) - (b0 + bx - psi) * e0
        )

    def implied_p_x(self) -> float:
        e0, e1 = self.exposure_probabilities()
        return (1 - self.p_z) * e0 + self.p_z * e1

    def first_stage_slope(self) -> float:
        """Populasjonens cov(X, Z) / var(Z); for binær Z er dette e1 - e0"""
        e0, e1 = self.exposure_probabilities()
        return e1 - e0


@dataclass(frozen=True)
class LogisticDgpConfig:
    psi: float
    alpha_star: float
    p_z: float
    p_x: float
    p_y: float
    gamma_0: float
    gamma_z: float
    beta_0: float
    beta_x: float
    beta_z: float
    beta_xz: float

    @property
    def link(self) -> Link:
        return Link.LOGIT

    def exposure_probabilities(self) -> Tuple[float, float]:
        return float(expit(self.gamma_0)), float(expit(self.gamma_0 + self.gamma_z))

    def untreated_probability(self, z: int) -> float:
        """P(Y_0 = 1 | Z = z)"""
        e = self.exposure_probabilities()[z]
        b0, bx, bz, bxz = self.beta_0, self.beta_x, self.beta_z, self.beta_xz
        return float(expit(b0 + bz * z) * (1 - e) + expit(b0 + bx + bz * z + bxz * z - self.psi) * e)

    def implied_alpha(self) -> float:
        """logit P(Y_0=1 | Z=1) - logit P(Y_0=1 | Z=0)"""
        return float(logit(self.untreated_probability(1)) - logit(self.untreated_probability(0)))

    def implied_p_x(self) -> float:
        e0, e1 = self.exposure_probabilities()
        return (1 - self.p_z) * e0 + self.p_z * e1

    def implied_p_y(self) -> float:
        e0, e1 = self.exposure_probabilities()
        b0, bx, bz, bxz = self.beta_0, self.beta_x, self.beta_z, self.beta_xz
        total = 0.0
        for z, weight, e in ((0, 1 - self.p_z, e0), (1, self.p_z, e1)):
            total += weight * ((1 - e) * expit(b0 + bz * z) + e * expit(b0 + bx + (bz + bxz) * z))
        return float(total)


DgpConfig = Union[LinearDgpConfig, LogisticDgpConfig]

# Minste residual over denne grensen betyr at (alpha*, p_y) ikke kan nås
UNREACHABLE_GAP = 1e-6


def _max_residual(residuals, params) -> float:
    if not np.all(np.isfinite(params)):
        return np.inf
    values = np.asarray(residuals(params), dtype=float)
    return float(np.max(np.abs(values))) if np.all(np.isfinite(values)) else np.inf


def _closest_attainable(residuals, p_y: float, max_iter: int) -> Tuple[np.ndarray, float]:
    """
    Minimerer residualene med least_squares fra flere startpunkter.

    Returns:
        (parametre, største absolutte residual) for beste start
    """
    best_params, best_residual = np.array([np.nan, np.nan]), np.inf
    for beta_0 in float(logit(p_y)) + np.array([-2.0, 0.0, 2.0]):
        for beta_xz in (-4.0, 0.0, 4.0):
            try:
                fit = least_squares(
                    residuals, x0=[beta_0, beta_xz], xtol=1e-15, ftol=1e-15, gtol=1e-15,
                    max_nfev=max_iter * 10,
                )
            except ValueError:
                continue
            residual = _max_residual(residuals, fit.x)
            if residual < best_residual:
                best_params, best_residual = fit.x, residual
    return best_params, best_residual


def calibrate_linear(
    psi: float,
    alpha_star: float,
    p_z: float = 0.5,
    p_x: float = 0.6,
    sigma: float = 1.0,
    beta_0: float = 1.0,
    beta_x: float = 1.0,
    beta_z: float = 1.0,
    gamma_0: float = -1.0,
) -> LinearDgpConfig:
    """
    Kalibrerer den lineære DGP-en.

    gamma_z løses i lukket form fra p_x; alpha* er affin i beta_xz med
    stigningstall e1 = expit(gamma_0 + gamma_z).

    Raises:
        UnreachableError: p_x kan ikke nås
    """
    gamma_z = _solve_gamma_z(p_z, p_x, gamma_0)
    base = LinearDgpConfig(
        psi=psi, alpha_star=alpha_star, p_z=p_z, gamma_0=gamma_0, gamma_z=gamma_z,
        beta_0=beta_0, beta_x=beta_x, beta_z=beta_z, beta_xz=0.0, sigma=sigma,
    )
    e1 = base.exposure_probabilities()[1]
    beta_xz = (alpha_star - base.implied_alpha()) / e1
    config = LinearDgpConfig(
        psi=psi, alpha_star=alpha_star, p_z=p_z, gamma_0=gamma_0, gamma_z=gamma_z,
        beta_0=beta_0, beta_x=beta_x, beta_z=beta_z, beta_xz=beta_xz, sigma=sigma,
    )
    logger.debug(f"Lineær kalibrering: gamma_z={gamma_z:.6f}, beta_xz={beta_xz:.6f}")
    return config


def calibrate_logistic(
    psi: float,
    alpha_star: float,
    p_z: float = 0.5,
    p_x: float = 0.6,
    p_y: float = 0.3,
    beta_x: float = 1.0,
    beta_z: float = 1.0,
    gamma_0: float = -1.0,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> LogisticDgpConfig:
    """
    Kalibrerer den logistiske DGP-en.

    Løser (beta_0, beta_xz) fra to ligninger: marginal P(Y=1) = p_y og
    implisert alpha = alpha_star. Bruker scipy.optimize.root (hybr) fra
    (logit p_y, 0), og least_squares fra flere startpunkter hvis hybr ikke
    konvergerer.

    Raises:
        UnreachableError: p_x eller p_y utenfor (0, 1), eller ingen
            (beta_0, beta_xz) kommer nærmere målet enn UNREACHABLE_GAP
        NoConvergenceError: Residual over tol, men under UNREACHABLE_GAP
    """
    if not 0.0 < p_y < 1.0:
        raise UnreachableError(f"p_y må ligge i (0, 1), fikk {p_y}")
    gamma_z = _solve_gamma_z(p_z, p_x, gamma_0)

    def make(params) -> LogisticDgpConfig:
        return LogisticDgpConfig(
            psi=psi, alpha_star=alpha_star, p_z=p_z, p_x=p_x, p_y=p_y,
            gamma_0=gamma_0, gamma_z=gamma_z,
            beta_0=float(params[0]), beta_x=beta_x, beta_z=beta_z, beta_xz=float(params[1]),
        )

    def residuals(params):
        config = make(params)
        return [config.implied_p_y() - p_y, config.implied_alpha() - alpha_star]

    solution = root(
        residuals,
        x0=[float(logit(p_y)), 0.0],
        method="hybr",
        options={"xtol": 1e-13, "maxfev": max_iter * 3},
    )
    params = solution.x
    residual = _max_residual(residuals, params)
    if not residual <= tol:
        params, residual = _closest_attainable(residuals, p_y, max_iter)
    if not residual <= tol:
        target = f"psi={psi}, alpha*={alpha_star}, p_z={p_z}, p_x={p_x}, p_y={p_y}"
        if residual > UNREACHABLE_GAP:
            logger.error(f"Logistisk kalibrering: målet kan ikke nås (minste residual {residual:.3e})")
            raise UnreachableError(f"Ingen (beta_0, beta_xz) gir {target}; minste residual {residual:.3e}")
        logger.error(f"Logistisk kalibrering feilet: {solution.message} (residual {residual:.3e})")
        raise NoConvergenceError(f"Fant ikke (beta_0, beta_xz) for {target}")
    config = make(params)
    logger.debug(f"Logistisk kalibrering: beta_0={config.beta_0:.6f}, beta_xz={config.beta_xz:.6f}")
    return config


def calibrate(simulation: SimulationConfig) -> DgpConfig:
    """Kalibrerer DGP-en for en simuleringsseksjon fra kjørekonfigurasjonen"""
    if simulation.link is Link.IDENTITY:
        return calibrate_linear(
            simulation.psi, simulation.alpha_star, simulation.p_z, simulation.p_x, simulation.sigma
        )
    if simulation.link is Link.LOGIT:
        return calibrate_logistic(
            simulation.psi, simulation.alpha_star, simulation.p_z, simulation.p_x, simulation.p_y
        )
    raise UnreachableError(f"Ingen kalibrert DGP for link={simulation.link.value}")


def replication_seed(master_seed: int, replication: int) -> np.random.SeedSequence:
    """Uavhengig frø for replikasjon r, avledet fra (master_seed, r)"""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(replication,))


def _exposure(config: DgpConfig, rng: np.random.Generator, n: int) -> Tuple[np.ndarray, np.ndarray]:
    z = rng.binomial(1, config.p_z, size=n).astype(float)
    x = rng.binomial(1, expit(config.gamma_0 + config.gamma_z * z)).astype(float)
    return x, z


def _outcome_mean(config: DgpConfig, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    return config.beta_0 + config.beta_x * x + config.beta_z * z + config.beta_xz * x * z


def generate_linear(config: LinearDgpConfig, n: int, seed: SeedLike) -> Dataset:
    """Trekker n observasjoner fra den lineære DGP-en; deterministisk gitt seed"""
    if n < 1:
        raise ValueError(f"n må være minst 1, fikk {n}")
    rng = np.random.default_rng(seed)
    x, z = _exposure(config, rng, n)
    y = _outcome_mean(config, x, z) + config.sigma * rng.standard_normal(n)
    return Dataset(y=y, x=x, z=z)


def generate_logistic(config: LogisticDgpConfig, n: int, seed: SeedLike) -> Dataset:
    """Trekker n observasjoner fra den logistiske DGP-en; alle kolonner er 0/1"""
    if n < 1:
        raise ValueError(f"n må være minst 1, fikk {n}")
    rng = np.random.default_rng(seed)
    x, z = _exposure(config, rng, n)
    y = rng.binomial(1, expit(_outcome_mean(config, x, z))).astype(float)
    return Dataset(y=y, x=x, z=z)


def generate(config: DgpConfig, n: int, seed: SeedLike) -> Dataset:
    if isinstance(config, LinearDgpConfig):
        return generate_linear(config, n, seed)
    return generate_logistic(config, n, seed)

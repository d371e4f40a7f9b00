"""
Stacked estimating equations and the sandwich covariance.

A StackedSystem evaluates the per-observation estimating functions Q_i for a
whole dataset at once (one row per observation). Bread and meat are sample
averages over those rows; the bread uses central finite differences so every
link shares one code path.
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, Tuple

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve
from scipy.stats import norm

from ..core import NegativeVarianceError, NonFiniteError, SingularBreadError
from ..data import Dataset

logger = logging.getLogger(__name__)

QFunction = Callable[[Dataset, np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class StackedSystem:
    """
    Stablede estimeringsligninger.

    q_fn(data, theta, alpha) returnerer en n x p-matrise; rad i er Q_i.
    `partition` navngir delene av theta, f.eks. {"beta_y": slice(0, 4),
    "mu_z": slice(4, 5), "psi": slice(5, 6)}.
    """

    q_fn: QFunction
    dim_p: int
    partition: Dict[str, slice] = field(default_factory=dict)

    def evaluate(self, data: Dataset, theta: np.ndarray, alpha: float) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim_p,):
            raise ValueError(f"theta har form {theta.shape}, forventet ({self.dim_p},)")
        q = np.asarray(self.q_fn(data, theta, alpha), dtype=float)
        if q.ndim == 1:
            q = q[:, None]
        if q.shape != (data.n, self.dim_p):
            raise ValueError(f"q_fn ga form {q.shape}, forventet ({data.n}, {self.dim_p})")
        if not np.all(np.isfinite(q)):
            raise NonFiniteError(f"Ikke-endelige estimeringsfunksjoner ved theta={theta}, alpha={alpha}")
        return q

    def mean(self, data: Dataset, theta: np.ndarray, alpha: float) -> np.ndarray:
        return self.evaluate(data, theta, alpha).mean(axis=0)

    def index_of(self, name: str) -> int:
        """Første indeks i theta for en navngitt del"""
        return self.partition[name].start


@dataclass(frozen=True)
class SandwichCovariance:
    bread: np.ndarray
    meat: np.ndarray
    variance: np.ndarray
    n: int
    asymmetry: float = 0.0   # maks |V - V^T| før symmetrisering

    def std_error(self, index: int) -> float:
        return float(np.sqrt(max(self.variance[index, index], 0.0)))


def bread_matrix(
    system: StackedSystem,
    data: Dataset,
    theta: np.ndarray,
    alpha: float,
    step: float = 1e-6,
) -> np.ndarray:
    """
    A = -(gjennomsnittlig Jacobi-matrise av Q med hensyn på theta).

    Sentraldifferanser med steg h_j = max(step, step * |theta_j|).

    Raises:
        NonFiniteError: En perturbert evaluering er ikke endelig
    """
    theta = np.asarray(theta, dtype=float)
    p = system.dim_p
    jacobian = np.empty((p, p))
    for j in range(p):
        h = max(step, step * abs(theta[j]))
        forward = theta.copy()
        backward = theta.copy()
        forward[j] += h
        backward[j] -= h
        jacobian[:, j] = (system.mean(data, forward, alpha) - system.mean(data, backward, alpha)) / (2.0 * h)
    return -jacobian


def meat_matrix(system: StackedSystem, data: Dataset, theta: np.ndarray, alpha: float) -> np.ndarray:
    """B = n^-1 sum_i Q_i Q_i^T"""
    q = system.evaluate(data, theta, alpha)
    return q.T @ q / data.n


def sandwich_variance(
    bread: np.ndarray,
    meat: np.ndarray,
    n: int,
    pivot_tol: float = 1e-12,
) -> SandwichCovariance:
    """
    V = n^-1 A^-1 B A^-T via LU-faktorisering med delvis pivotering.

    Args:
        bread: Kvadratisk matrise A
        meat: Matrise B med samme form
        n: Utvalgsstørrelse

    Returns:
        SandwichCovariance med symmetrisert V

    Raises:
        SingularBreadError: En pivot er mindre enn pivot_tol i absoluttverdi
    """
    bread = np.atleast_2d(np.asarray(bread, dtype=float))
    meat = np.atleast_2d(np.asarray(meat, dtype=float))
    if bread.shape[0] != bread.shape[1] or meat.shape != bread.shape:
        raise ValueError(f"Inkompatible former: A {bread.shape}, B {meat.shape}")
    if n < 1:
        raise ValueError(f"n må være minst 1, fikk {n}")
    if not (np.all(np.isfinite(bread)) and np.all(np.isfinite(meat))):
        raise NonFiniteError("Bread eller meat inneholder ikke-endelige verdier")

    with warnings.catch_warnings():
        # Eksakt singulære matriser fanges av pivotsjekken under
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(bread)
    pivots = np.abs(np.diag(lu))
    index = int(np.argmin(pivots))
    if pivots[index] < pivot_tol:
        logger.debug(f"Singulær bread-matrise:\n{bread}")
        raise SingularBreadError(float(pivots[index]), index)

    # A^-1 B A^-T = (A^-1 (A^-1 B)^T)^T
    left = lu_solve((lu, piv), meat)
    variance = lu_solve((lu, piv), left.T).T / n
    asymmetry = float(np.max(np.abs(variance - variance.T)))
    variance = (variance + variance.T) / 2.0
    return SandwichCovariance(bread=bread, meat=meat, variance=variance, n=n, asymmetry=asymmetry)


def wald_ci(estimate: float, variance: float, level: float = 0.95) -> Tuple[float, float]:
    """
    Wald-intervall est +/- z * sqrt(v), z = normalkvantilen i (1 + level) / 2.

    Raises:
        NegativeVarianceError: variance < 0
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level må ligge i (0, 1), fikk {level}")
    if variance < 0 or not np.isfinite(variance):
        raise NegativeVarianceError(f"Ugyldig varians: {variance}")
    half = norm.ppf((1.0 + level) / 2.0) * np.sqrt(variance)
    return float(estimate - half), float(estimate + half)

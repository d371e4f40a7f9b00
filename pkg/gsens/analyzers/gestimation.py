"""G-estimation of the causal effect psi at fixed alpha, and sweeps over alpha."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..config import EstimateStatus, Link, SolverConfig
from ..core import DomainError, NegativeVarianceError, SingularBreadError
from ..data import Dataset
from ..estimation import (
    SandwichCovariance,
    bread_matrix,
    meat_matrix,
    sandwich_variance,
    solve_scalar_root,
    wald_ci,
)
from ..models import (
    SmmSpec,
    build_stacked_system,
    d_function,
    fit_instrument_model,
    fit_outcome_model,
    h_psi_alpha,
)

logger = logging.getLogger(__name__)

NAN_INTERVAL = (float("nan"), float("nan"))


@dataclass(frozen=True, eq=False)
class GEstimate:
    """Resultat av G-estimering ved én verdi av alpha"""

    alpha: float
    psi: float
    theta: np.ndarray
    status: EstimateStatus
    link: Link
    ci: Tuple[float, float] = NAN_INTERVAL
    cov: Optional[SandwichCovariance] = None
    level: float = 0.95
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.status is EstimateStatus.SOLVED

    @property
    def variance(self) -> float:
        return float(self.cov.variance[-1, -1]) if self.cov is not None else float("nan")

    @property
    def std_error(self) -> float:
        return float(np.sqrt(self.variance)) if self.solved else float("nan")

    @property
    def odds_ratio(self) -> float:
        """e^psi; kausal oddsratio for logit-link"""
        return float(np.exp(self.psi))

    @property
    def odds_ratio_ci(self) -> Tuple[float, float]:
        return float(np.exp(self.ci[0])), float(np.exp(self.ci[1]))

    def covers(self, value: float) -> bool:
        return self.solved and self.ci[0] <= value <= self.ci[1]

    def to_record(self) -> Dict[str, Any]:
        record = {
            "alpha": self.alpha,
            "psi_hat": self.psi,
            "ci_lo": self.ci[0],
            "ci_hi": self.ci[1],
        }
        if self.link is Link.LOGIT:
            or_lo, or_hi = self.odds_ratio_ci
            record.update({"or_hat": self.odds_ratio, "or_lo": or_lo, "or_hi": or_hi})
        record["status"] = self.status.value
        return record


@dataclass(frozen=True)
class SweepResult:
    grid: Tuple[float, ...]
    entries: Tuple[GEstimate, ...]

    def __post_init__(self):
        if len(self.grid) != len(self.entries):
            raise ValueError("grid og entries har ulik lengde")

    @property
    def link(self) -> Link:
        return self.entries[0].link

    @property
    def solved_entries(self) -> Tuple[GEstimate, ...]:
        return tuple(e for e in self.entries if e.solved)

    @property
    def solvable_range(self) -> Optional[Tuple[float, float]]:
        """Minste og største alpha med status solved, eller None"""
        alphas = [e.alpha for e in self.solved_entries]
        if not alphas:
            return None
        return min(alphas), max(alphas)

    def psi_bounds(self) -> Optional[Dict[str, float]]:
        """
        Spennet av psi og ytterste konfidensgrenser over løste punkter.

        Tolkes som grenser for effekten når alpha antas å ligge i griddet.
        """
        solved = self.solved_entries
        if not solved:
            return None
        return {
            "psi_min": min(e.psi for e in solved),
            "psi_max": max(e.psi for e in solved),
            "ci_lo": min(e.ci[0] for e in solved),
            "ci_hi": max(e.ci[1] for e in solved),
        }

    @property
    def sign_stable(self) -> bool:
        """Samme fortegn på psi i alle løste punkter"""
        signs = {np.sign(e.psi) for e in self.solved_entries}
        return len(signs) == 1

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([e.to_record() for e in self.entries])


class GEstimator:
    """
    G-estimator for én datasett/modell-kombinasjon.

    Nuisance-modellene tilpasses én gang; psi løses per alpha med dem holdt
    faste, mens variansen bruker hele det stablede systemet.
    """

    def __init__(self, data: Dataset, spec: SmmSpec, solver: Optional[SolverConfig] = None):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.data = data
        self.spec = spec
        self.solver = solver or SolverConfig()
        self.validate_data()

        try:
            self.outcome = (
                fit_outcome_model(data, spec.outcome_formula) if spec.needs_outcome_model else None
            )
            self.instrument = fit_instrument_model(data, spec.instrument_formula)
        except Exception as e:
            self.logger.error(f"Feil ved tilpasning av nuisance-modeller: {str(e)}")
            raise

        self.system = build_stacked_system(data, spec)
        self._d = d_function(data, self.instrument)
        parts = [self.instrument.params]
        if self.outcome is not None:
            parts.insert(0, self.outcome.params)
        self._nuisance = np.concatenate(parts)

    def validate_data(self) -> None:
        """Sjekker at data passer linken"""
        if self.spec.link is Link.LOGIT and not self.data.y_is_binary:
            raise DomainError("Logit-link krever y i {0, 1}")
        if self.spec.link is Link.LOG and np.any(self.data.y < 0):
            raise DomainError("Log-link krever ikke-negativ Y")

    def estimating_function(self, alpha: float):
        """psi -> gjennomsnittet av D * h(psi; alpha) med faste nuisance-estimater"""

        def f(psi: float) -> float:
            h = h_psi_alpha(self.data, psi, alpha, self.spec, self.outcome)
            return float(np.mean(self._d * h))

        return f

    def _bracket(self, start: Optional[float]) -> Tuple[float, float]:
        lower, upper = self.solver.bracket
        if start is None or not np.isfinite(start):
            return lower, upper
        width = self.solver.warm_start_width
        warm = (max(lower, start - width), min(upper, start + width))
        return warm if warm[0] < warm[1] else (lower, upper)

    def fit(self, alpha: float, start: Optional[float] = None) -> GEstimate:
        """
        Løser psi-ligningen ved gitt alpha og beregner sandwich-KI.

        Args:
            alpha: Sensitivitetsparameter
            start: Forrige løsning; gir et smalere søkeintervall (varmstart).
                En enkelt rot der brukes selv om hele intervallet har flere
                røtter; uten start velges alltid roten med minste |psi|

        Returns:
            GEstimate; NoSolution og singulær kovarians er statuser, ikke feil
        """
        alpha = float(alpha)
        f = self.estimating_function(alpha)
        bracket = self._bracket(start)
        root = solve_scalar_root(f, bracket, self.solver.tol, self.solver.scan_points)
        warm = bracket != tuple(self.solver.bracket)
        if warm and (not root.solved or root.multiplicity > 1):
            # Flere røtter i varmstartintervallet: velg etter minste |psi| over hele intervallet
            self.logger.debug(f"{root.multiplicity} røtter i varmstartintervallet {bracket}; skanner hele")
            root = solve_scalar_root(f, self.solver.bracket, self.solver.tol, self.solver.scan_points)
            warm = False

        diagnostics: Dict[str, Any] = {
            "root_residual": root.residual,
            "multiplicity": root.multiplicity,
            "multiple_roots": root.multiplicity > 1,
            "roots": root.roots,
            "bracket": root.bracket,
            "warm_start": warm,
        }
        base = dict(alpha=alpha, link=self.spec.link, level=self.solver.level, diagnostics=diagnostics)

        if not root.solved:
            theta = np.append(self._nuisance, np.nan)
            return GEstimate(psi=float("nan"), theta=theta, status=EstimateStatus.NO_SOLUTION, **base)

        theta = np.append(self._nuisance, root.root)
        residual = float(np.max(np.abs(self.system.mean(self.data, theta, alpha))))
        diagnostics["system_residual"] = residual
        if residual > self.solver.residual_tol:
            self.logger.warning(f"alpha={alpha}: residual {residual:.3e} i det stablede systemet er for stor")
            return GEstimate(psi=root.root, theta=theta, status=EstimateStatus.NO_SOLUTION, **base)

        try:
            bread = bread_matrix(self.system, self.data, theta, alpha, self.solver.jacobian_step)
            meat = meat_matrix(self.system, self.data, theta, alpha)
            cov = sandwich_variance(bread, meat, self.data.n, self.solver.pivot_tol)
            ci = wald_ci(root.root, cov.variance[-1, -1], self.solver.level)
        except (SingularBreadError, NegativeVarianceError) as e:
            self.logger.warning(f"alpha={alpha}: singulær kovarians ({str(e)})")
            return GEstimate(psi=root.root, theta=theta, status=EstimateStatus.SINGULAR_COVARIANCE, **base)

        return GEstimate(psi=root.root, theta=theta, status=EstimateStatus.SOLVED, ci=ci, cov=cov, **base)

    def sweep(self, grid: Sequence[float], workers: int = 1, warm_start: bool = True) -> SweepResult:
        """
        G-estimerer for hver alpha i griddet.

        Med workers > 1 evalueres punktene samtidig uten varmstart, slik at
        resultatet er uavhengig av rekkefølgen.
        """
        grid = tuple(float(a) for a in grid)
        if not grid:
            raise ValueError("Griddet kan ikke være tomt")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("Griddet må være strengt stigende")

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                entries = list(executor.map(self.fit, grid))
        else:
            entries = []
            previous = None
            for alpha in grid:
                estimate = self.fit(alpha, start=previous if warm_start else None)
                if np.isfinite(estimate.psi):
                    previous = estimate.psi
                entries.append(estimate)

        result = SweepResult(grid=grid, entries=tuple(entries))
        self.logger.debug(
            f"Sweep over {len(grid)} alpha-verdier ferdig; løsbart område: {result.solvable_range}"
        )
        return result


def default_alpha_grid(center: float = 0.0, half_width: float = 0.2, step: float = 0.02) -> Tuple[float, ...]:
    """center + k * step for |k * step| <= half_width (21 punkter med standardverdiene)"""
    if step <= 0:
        raise ValueError("step må være positiv")
    if half_width < 0:
        raise ValueError("half_width kan ikke være negativ")
    k_max = int(np.floor(half_width / step + 1e-9))
    return tuple(round(center + k * step, 12) for k in range(-k_max, k_max + 1))


def fit_g_estimator(
    data: Dataset,
    spec: SmmSpec,
    alpha: float,
    solver: Optional[SolverConfig] = None,
) -> GEstimate:
    """G-estimat av psi ved fast alpha"""
    return GEstimator(data, spec, solver).fit(alpha)


def sweep_alpha(
    data: Dataset,
    spec: SmmSpec,
    grid: Sequence[float],
    solver: Optional[SolverConfig] = None,
    workers: int = 1,
    warm_start: bool = True,
) -> SweepResult:
    """G-estimat av psi for hver alpha i griddet"""
    return GEstimator(data, spec, solver).sweep(grid, workers=workers, warm_start=warm_start)

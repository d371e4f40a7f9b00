"""
Monte Carlo harness: coverage and CI length of the G-estimator over an alpha grid.

Each replication r draws its own dataset from SeedSequence(master_seed, r),
so reports are identical for any number of worker processes.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..analyzers import GEstimator
from ..config import EstimateStatus, Link, RuntimeSettings, SolverConfig
from ..core import DataError, EstimationError, UnsupportedCombinationError
from ..models import SmmSpec
from .dgp import DgpConfig, generate, replication_seed

logger = logging.getLogger(__name__)

# Statuskoder per (replikasjon, alpha)
SOLVED, NO_SOLUTION, SINGULAR, FIT_FAILED = 0, 1, 2, 3
_STATUS_CODES = {
    EstimateStatus.SOLVED: SOLVED,
    EstimateStatus.NO_SOLUTION: NO_SOLUTION,
    EstimateStatus.SINGULAR_COVARIANCE: SINGULAR,
}

CSV_COLUMNS = ["alpha", "coverage", "mean_ci_length", "mean_est", "q25", "q50", "q75", "n_solved", "n_failed"]


@dataclass(frozen=True, eq=False)
class MonteCarloReport:
    """Oppsummering per alpha over m replikasjoner"""

    grid: Tuple[float, ...]
    link: Link
    psi: float
    alpha_star: float
    n: int
    m: int
    master_seed: int
    coverage: np.ndarray
    mean_ci_length: np.ndarray
    mean_est: np.ndarray
    sd_est: np.ndarray
    q25: np.ndarray
    q50: np.ndarray
    q75: np.ndarray
    n_solved: np.ndarray
    n_no_solution: np.ndarray
    n_singular: np.ndarray
    n_fit_failed: np.ndarray

    @property
    def n_failed(self) -> np.ndarray:
        return self.m - self.n_solved

    @property
    def bias(self) -> np.ndarray:
        return self.mean_est - self.psi

    @property
    def mc_standard_error(self) -> np.ndarray:
        """Monte Carlo-standardfeil for gjennomsnittet av psi-estimatene"""
        with np.errstate(invalid="ignore", divide="ignore"):
            return self.sd_est / np.sqrt(self.n_solved)

    def index_of(self, alpha: float) -> int:
        matches = np.flatnonzero(np.isclose(self.grid, alpha, atol=1e-9))
        if not len(matches):
            raise KeyError(f"alpha={alpha} finnes ikke i griddet")
        return int(matches[0])

    def to_frame(self, extended: bool = False) -> pd.DataFrame:
        frame = pd.DataFrame({
            "alpha": np.asarray(self.grid),
            "coverage": self.coverage,
            "mean_ci_length": self.mean_ci_length,
            "mean_est": self.mean_est,
            "q25": self.q25,
            "q50": self.q50,
            "q75": self.q75,
            "n_solved": self.n_solved,
            "n_failed": self.n_failed,
        })
        if extended:
            frame["sd_est"] = self.sd_est
            frame["bias"] = self.bias
            frame["n_no_solution"] = self.n_no_solution
            frame["n_singular"] = self.n_singular
            frame["n_fit_failed"] = self.n_fit_failed
        return frame

    def metadata(self) -> Dict[str, object]:
        return {
            "link": self.link.value,
            "psi": self.psi,
            "alpha_star": self.alpha_star,
            "n": self.n,
            "m": self.m,
            "master_seed": self.master_seed,
        }


def _replicate(
    config: DgpConfig,
    spec: SmmSpec,
    n: int,
    grid: Tuple[float, ...],
    master_seed: int,
    replication: int,
    solver: SolverConfig,
) -> np.ndarray:
    """Én replikasjon: (len(grid), 4)-matrise med psi, ci_lo, ci_hi, statuskode"""
    out = np.full((len(grid), 4), np.nan)
    data = generate(config, n, replication_seed(master_seed, replication))
    try:
        sweep = GEstimator(data, spec, solver).sweep(grid)
    except (EstimationError, DataError) as e:
        logger.debug(f"Replikasjon {replication}: tilpasning feilet ({str(e)})")
        out[:, 3] = FIT_FAILED
        return out
    for i, estimate in enumerate(sweep.entries):
        out[i] = (estimate.psi, estimate.ci[0], estimate.ci[1], _STATUS_CODES[estimate.status])
    return out


def _replicate_batch(args) -> List[Tuple[int, np.ndarray]]:
    """Kjører en bunke replikasjoner i en arbeidsprosess (må ligge på modulnivå for pickling)"""
    config, spec, n, grid, master_seed, replications, solver = args
    return [
        (r, _replicate(config, spec, n, grid, master_seed, r, solver))
        for r in replications
    ]


def _column_summary(values: np.ndarray) -> Tuple[float, float, float, float, float]:
    """mean, sd, q25, q50, q75 for endelige verdier; NaN hvis ingen"""
    values = values[np.isfinite(values)]
    if not len(values):
        return (np.nan,) * 5
    q25, q50, q75 = np.quantile(values, [0.25, 0.5, 0.75])
    sd = float(np.std(values, ddof=1)) if len(values) > 1 else np.nan
    return float(np.mean(values)), sd, float(q25), float(q50), float(q75)


def aggregate(
    results: np.ndarray,
    config: DgpConfig,
    grid: Tuple[float, ...],
    n: int,
    master_seed: int,
) -> MonteCarloReport:
    """
    Slår sammen replikasjoner (m x len(grid) x 4) til en rapport.

    Dekningsgraden bruker alle m replikasjoner i nevneren; feilede teller som
    ikke-dekkende. Gjennomsnittlig KI-lengde og fordelingsmål bruker bare løste.
    """
    m = results.shape[0]
    psi_hat, lo, hi, status = (results[:, :, k] for k in range(4))
    solved = status == SOLVED
    covered = solved & (lo <= config.psi) & (config.psi <= hi)

    lengths = np.where(solved, hi - lo, np.nan)
    estimates = np.where(solved, psi_hat, np.nan)
    summaries = np.array([_column_summary(estimates[:, j]) for j in range(len(grid))])
    mean_length = np.array([
        np.mean(col[np.isfinite(col)]) if np.isfinite(col).any() else np.nan for col in lengths.T
    ])

    return MonteCarloReport(
        grid=tuple(grid),
        link=config.link,
        psi=config.psi,
        alpha_star=config.alpha_star,
        n=n,
        m=m,
        master_seed=master_seed,
        coverage=covered.sum(axis=0) / m,
        mean_ci_length=mean_length,
        mean_est=summaries[:, 0],
        sd_est=summaries[:, 1],
        q25=summaries[:, 2],
        q50=summaries[:, 3],
        q75=summaries[:, 4],
        n_solved=solved.sum(axis=0),
        n_no_solution=(status == NO_SOLUTION).sum(axis=0),
        n_singular=(status == SINGULAR).sum(axis=0),
        n_fit_failed=(status == FIT_FAILED).sum(axis=0),
    )


def run_monte_carlo(
    config: DgpConfig,
    spec: SmmSpec,
    n: int,
    m: int,
    grid: Sequence[float],
    master_seed: int,
    workers: Optional[int] = None,
    solver: Optional[SolverConfig] = None,
) -> MonteCarloReport:
    """
    Kjører m replikasjoner og oppsummerer per alpha.

    Args:
        config: Kalibrert DGP (lineær eller logistisk)
        spec: Modellbeskrivelse; linken må passe DGP-en
        n: Utvalgsstørrelse per replikasjon
        m: Antall replikasjoner
        grid: alpha-verdier; sorteres stigende og duplikater fjernes
        master_seed: Hovedfrø
        workers: Antall prosesser; standard er GSENS_THREADS eller antall kjerner

    Returns:
        MonteCarloReport

    Raises:
        UnsupportedCombinationError: log-link, eller link som ikke passer DGP-en
    """
    if spec.link is Link.LOG:
        raise UnsupportedCombinationError("Simulering med log-link støttes ikke (ingen kalibrert DGP)")
    if spec.link is not config.link:
        raise UnsupportedCombinationError(
            f"Modellens link {spec.link.value} passer ikke DGP-en ({config.link.value})"
        )
    ordered = tuple(sorted(set(float(a) for a in grid)))
    if ordered != tuple(float(a) for a in grid):
        logger.warning(f"Griddet er sortert og duplikater fjernet: {len(ordered)} alpha-verdier")
    grid = ordered
    if not grid:
        raise ValueError("Griddet kan ikke være tomt")
    if m < 1 or n < 1:
        raise ValueError(f"m og n må være minst 1, fikk m={m}, n={n}")

    solver = solver or SolverConfig()
    workers = workers or RuntimeSettings().threads
    workers = max(1, min(workers, m))
    start_time = time.time()
    logger.info(
        f"Starter {m} replikasjoner (n={n}, link={spec.link.value}, psi={config.psi}, "
        f"alpha*={config.alpha_star}) med {workers} arbeidere"
    )

    results = np.empty((m, len(grid), 4))
    if workers == 1:
        for r in range(m):
            results[r] = _replicate(config, spec, n, grid, master_seed, r, solver)
    else:
        # Flere bunker enn arbeidere gir jevnere last
        chunks = np.array_split(np.arange(m), min(workers * 4, m))
        batch_args = [
            (config, spec, n, grid, master_seed, [int(r) for r in chunk], solver)
            for chunk in chunks
        ]
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_replicate_batch, args) for args in batch_args]
            for completed, future in enumerate(as_completed(futures), start=1):
                for r, out in future.result():
                    results[r] = out
                logger.debug(f"Bunke {completed}/{len(futures)} ferdig")

    report = aggregate(results, config, grid, n, master_seed)
    logger.info(f"Simulering ferdig på {time.time() - start_time:.1f} s")
    return report

"""Instrument relevance: first-stage regression of the exposure on the instrument."""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd
from scipy import stats

from ..core import RankDeficientError
from ..data import Dataset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RelevanceResult:
    f_stat: float
    coef: float
    ci: Tuple[float, float]
    df: Tuple[int, int]
    p_value: float
    n: int
    perfect_collinearity: bool = False

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{
            "f_stat": self.f_stat,
            "df1": self.df[0],
            "df2": self.df[1],
            "coef": self.coef,
            "ci_lo": self.ci[0],
            "ci_hi": self.ci[1],
            "p_value": self.p_value,
            "n": self.n,
            "perfect_collinearity": self.perfect_collinearity,
        }])


def relevance_check(data: Dataset, level: float = 0.95) -> RelevanceResult:
    """
    OLS av X på konstantledd + Z med F-test for Z-koeffisienten.

    Med én forklaringsvariabel er F = t^2 på (1, n - 2) frihetsgrader.

    Raises:
        RankDeficientError: Z er konstant
        ValueError: n < 3
    """
    n = data.n
    if n < 3:
        raise ValueError(f"Relevanstesten krever minst 3 observasjoner, fikk {n}")
    if np.all(data.z == data.z[0]):
        raise RankDeficientError("Instrumentet er konstant")

    fit = stats.linregress(data.z, data.x)
    df2 = n - 2
    t_crit = stats.t.ppf((1.0 + level) / 2.0, df2)

    perfect = not fit.stderr > 1e-12 * max(abs(fit.slope), 1.0)
    if perfect:
        logger.warning("Eksponering og instrument er perfekt kollineære; F er uendelig")
        f_stat = float("inf")
        p_value = 0.0
    else:
        f_stat = float((fit.slope / fit.stderr) ** 2)
        p_value = float(stats.f.sf(f_stat, 1, df2))

    half = t_crit * fit.stderr
    result = RelevanceResult(
        f_stat=f_stat,
        coef=float(fit.slope),
        ci=(float(fit.slope - half), float(fit.slope + half)),
        df=(1, df2),
        p_value=p_value,
        n=n,
        perfect_collinearity=perfect,
    )
    logger.info(f"Relevans: F={f_stat:.3f} på (1, {df2}) df, koeffisient {fit.slope:.3f}")
    return result

"""Outcome model E[Y | X, Z, L; beta_Y]."""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import lstsq
from scipy.special import expit

from ..core import DomainError
from ..data import Dataset
from .base import Formula, NuisanceModel, check_rank, design_matrix, logistic_scores, newton_logistic

logger = logging.getLogger(__name__)

DEFAULT_OUTCOME_FORMULA: Formula = ("intercept", "x", "z", "x:z")


@dataclass(frozen=True, eq=False)
class OutcomeModel(NuisanceModel):
    """
    Tilpasset utfallsmodell.

    family "logistic" gir koeffisienter på logit-skala (brukes av logit-linken);
    "linear" er vanlig minste kvadraters regresjon.
    """

    beta: np.ndarray
    formula: Formula = DEFAULT_OUTCOME_FORMULA
    converged: bool = True
    iterations: int = 0
    family: str = "logistic"

    @property
    def params(self) -> np.ndarray:
        return self.beta

    def linear_predictor(self, data: Dataset, params: np.ndarray = None) -> np.ndarray:
        beta = self.beta if params is None else params
        return design_matrix(data, self.formula) @ beta

    def predict(self, data: Dataset, params: np.ndarray = None) -> np.ndarray:
        eta = self.linear_predictor(data, params)
        return expit(eta) if self.family == "logistic" else eta

    def scores(self, data: Dataset, params: np.ndarray = None) -> np.ndarray:
        beta = self.beta if params is None else params
        design = design_matrix(data, self.formula)
        if self.family == "logistic":
            return logistic_scores(design, data.y, beta)
        return design * (data.y - design @ beta)[:, None]


def fit_outcome_model(
    data: Dataset,
    formula: Sequence[str] = DEFAULT_OUTCOME_FORMULA,
    family: str = "logistic",
) -> OutcomeModel:
    """
    Tilpasser utfallsmodellen.

    Args:
        data: Datasett; y må være 0/1 for logistisk familie
        formula: Ledd i modellen
        family: "logistic" (Newton-Raphson) eller "linear" (minste kvadrater)

    Returns:
        OutcomeModel

    Raises:
        DomainError: Ikke-binær respons med logistisk familie
        SeparationError: Newton-Raphson divergerer
        RankDeficientError: Singulær designmatrise
    """
    formula = tuple(formula)
    design = design_matrix(data, formula)
    check_rank(design, formula)

    if family == "logistic":
        if not data.y_is_binary:
            raise DomainError("Logistisk utfallsmodell krever y i {0, 1}")
        try:
            beta, iterations = newton_logistic(design, data.y)
        except Exception as e:
            logger.error(f"Feil ved tilpasning av utfallsmodell {list(formula)}: {str(e)}")
            raise
        logger.debug(f"Utfallsmodell konvergerte etter {iterations} iterasjoner: {beta}")
        return OutcomeModel(beta=beta, formula=formula, converged=True, iterations=iterations)

    if family == "linear":
        beta = lstsq(design, data.y)[0]
        return OutcomeModel(beta=beta, formula=formula, family="linear")

    raise ValueError(f"Ukjent familie: {family}")

"""Instrument model E[Z | L; mu_Z]."""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import lstsq
from scipy.special import expit

from ..core import RankDeficientError
from ..data import Dataset
from .base import Formula, NuisanceModel, check_rank, design_matrix, logistic_scores, newton_logistic

logger = logging.getLogger(__name__)

DEFAULT_INSTRUMENT_FORMULA: Formula = ("intercept",)


def instrument_family(data: Dataset, formula: Sequence[str]) -> str:
    """
    "mean" for modell med bare konstantledd, ellers "logistic" for binær Z
    og "linear" for reell Z.
    """
    formula = tuple(formula)
    for term in formula:
        if "x" in term.split(":") or "z" in term.split(":"):
            raise ValueError(f"Instrumentmodellen kan bare bruke konfundere, fikk ledd {term!r}")
    if formula == ("intercept",):
        return "mean"
    return "logistic" if data.z_is_binary else "linear"


@dataclass(frozen=True, eq=False)
class InstrumentModel(NuisanceModel):
    coef: np.ndarray
    formula: Formula = DEFAULT_INSTRUMENT_FORMULA
    family: str = "mean"

    @property
    def params(self) -> np.ndarray:
        return self.coef

    @property
    def mu_z(self) -> float:
        """Tilpasset E[Z] for modellen uten konfundere"""
        if self.family != "mean":
            raise ValueError("mu_z er bare skalar for modellen med konstantledd; bruk predict()")
        return float(self.coef[0])

    def predict(self, data: Dataset, params: np.ndarray = None) -> np.ndarray:
        coef = self.coef if params is None else params
        if self.family == "mean":
            return np.full(data.n, coef[0])
        eta = design_matrix(data, self.formula) @ coef
        return expit(eta) if self.family == "logistic" else eta

    def scores(self, data: Dataset, params: np.ndarray = None) -> np.ndarray:
        """S(L, Z; mu_Z); for konstantleddmodellen er dette Z - mu_Z"""
        coef = self.coef if params is None else params
        if self.family == "mean":
            return (data.z - coef[0])[:, None]
        design = design_matrix(data, self.formula)
        if self.family == "logistic":
            return logistic_scores(design, data.z, coef)
        return design * (data.z - design @ coef)[:, None]


def fit_instrument_model(
    data: Dataset,
    formula: Sequence[str] = DEFAULT_INSTRUMENT_FORMULA,
) -> InstrumentModel:
    """
    Tilpasser E[Z | L].

    Med bare konstantledd er mu_Z utvalgsgjennomsnittet av Z. Med konfundere
    brukes logistisk regresjon for binær Z og minste kvadrater ellers.

    Raises:
        RankDeficientError: Konstant Z med konfundere, eller singulær designmatrise
    """
    formula = tuple(formula)
    family = instrument_family(data, formula)
    if family == "mean":
        return InstrumentModel(coef=np.array([np.mean(data.z)]), formula=formula, family=family)

    if np.all(data.z == data.z[0]):
        raise RankDeficientError("Instrumentet er konstant; modellen med konfundere er ikke identifisert")
    design = design_matrix(data, formula)
    check_rank(design, formula)

    if family == "logistic":
        try:
            coef, iterations = newton_logistic(design, data.z)
        except Exception as e:
            logger.error(f"Feil ved tilpasning av instrumentmodell {list(formula)}: {str(e)}")
            raise
        logger.debug(f"Instrumentmodell konvergerte etter {iterations} iterasjoner")
    else:
        coef = lstsq(design, data.z)[0]
    return InstrumentModel(coef=coef, formula=formula, family=family)

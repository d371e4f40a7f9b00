"""Shared pieces for the nuisance models: design matrices and logistic Newton fits."""

import logging
from abc import ABC, abstractmethod
from typing import Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, solve
from scipy.special import expit

from ..core import RankDeficientError, SeparationError
from ..data import Dataset

logger = logging.getLogger(__name__)

Formula = Tuple[str, ...]

# Grense for |beta| før vi antar (kvasi)separasjon
MAX_COEF_NORM = 50.0


def _term_column(data: Dataset, name: str) -> np.ndarray:
    if name == "x":
        return data.x
    if name == "z":
        return data.z
    if name == "y":
        raise ValueError("Utfallet kan ikke brukes som forklaringsvariabel")
    return data.covariate(name)


def design_matrix(data: Dataset, formula: Sequence[str]) -> np.ndarray:
    """
    Bygger designmatrisen for en liste med ledd.

    Gyldige ledd: "intercept", "x", "z", konfundernavn, og produkter skrevet
    som "a:b" (f.eks. "x:z").
    """
    if not formula:
        raise ValueError("Formelen må ha minst ett ledd")
    columns = []
    for term in formula:
        if term == "intercept":
            columns.append(np.ones(data.n))
            continue
        column = np.ones(data.n)
        for factor in term.split(":"):
            column = column * _term_column(data, factor)
        columns.append(column)
    return np.column_stack(columns)


def check_rank(design: np.ndarray, formula: Sequence[str]) -> None:
    """Raises RankDeficientError hvis designmatrisen ikke har full kolonnerang"""
    rank = np.linalg.matrix_rank(design)
    if rank < design.shape[1]:
        raise RankDeficientError(
            f"Designmatrisen for {list(formula)} har rang {rank} < {design.shape[1]}"
        )


def logistic_scores(design: np.ndarray, response: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Bidrag til scorefunksjonen per observasjon (n x k)"""
    return design * (response - expit(design @ beta))[:, None]


def newton_logistic(
    design: np.ndarray,
    response: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> Tuple[np.ndarray, int]:
    """
    Maksimum likelihood for logistisk regresjon med Newton-Raphson.

    Konvergens når max |sum_i S_i(beta)| <= tol. Stopper Newton-steget på
    maskinpresisjon før det, godtas løsningen hvis scoren er under 1e-8.

    Args:
        design: n x k designmatrise med full rang
        response: 0/1-respons
        tol: Toleranse for scoren
        max_iter: Maks antall iterasjoner

    Returns:
        (beta, antall iterasjoner)

    Raises:
        SeparationError: Konstant respons, |beta| > 50 eller ingen konvergens
        RankDeficientError: Designmatrisen er singulær
    """
    if np.all(response == response[0]):
        raise SeparationError(f"Responsen er konstant ({response[0]:g}); MLE finnes ikke")
    check_rank(design, [f"c{j}" for j in range(design.shape[1])])

    beta = np.zeros(design.shape[1])
    for iteration in range(1, max_iter + 1):
        p = expit(design @ beta)
        score = design.T @ (response - p)
        max_score = float(np.max(np.abs(score)))
        logger.debug(f"Newton iterasjon {iteration}: max|score|={max_score:.3e}")
        if max_score <= tol:
            return beta, iteration - 1

        information = design.T @ (design * (p * (1.0 - p))[:, None])
        try:
            step = solve(information, score, assume_a="pos")
        except LinAlgError:
            raise SeparationError("Fisher-informasjonen er singulær; mulig separasjon")
        beta = beta + step

        if np.linalg.norm(beta) > MAX_COEF_NORM:
            raise SeparationError(f"Koeffisientene divergerer (|beta| > {MAX_COEF_NORM:g})")
        if np.max(np.abs(step)) <= 1e-14 * (1.0 + np.max(np.abs(beta))):
            final = float(np.max(np.abs(design.T @ (response - expit(design @ beta)))))
            if final <= 1e-8:
                logger.debug(f"Newton stoppet på maskinpresisjon, max|score|={final:.3e}")
                return beta, iteration

    raise SeparationError(f"Newton-Raphson konvergerte ikke på {max_iter} iterasjoner")


class NuisanceModel(ABC):
    """Abstrakt baseklasse for modellene som stables sammen med psi-ligningen."""

    formula: Formula

    @property
    @abstractmethod
    def params(self) -> np.ndarray:
        """Tilpassede parametere i rekkefølgen de stables i theta"""
        pass

    @abstractmethod
    def predict(self, data: Dataset, params: np.ndarray = None) -> np.ndarray:
        """Forventet respons per observasjon"""
        pass

    @abstractmethod
    def scores(self, data: Dataset, params: np.ndarray = None) -> np.ndarray:
        """Estimeringsfunksjoner per observasjon (n x dim)"""
        pass

    @property
    def dim(self) -> int:
        return len(self.params)

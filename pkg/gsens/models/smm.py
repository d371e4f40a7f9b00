"""
Structural mean model pieces: the residual transform h(psi; alpha), the
violation b(L, Z; alpha) = alpha * Z, the D-function and the stacked system.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from scipy.special import expit

from ..config import Link
from ..core import DomainError, MissingOutcomeModelError
from ..data import Dataset
from ..estimation import StackedSystem
from .base import Formula
from .instrument import DEFAULT_INSTRUMENT_FORMULA, InstrumentModel, instrument_family
from .outcome import DEFAULT_OUTCOME_FORMULA, OutcomeModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SmmSpec:
    """
    Beskrivelse av strukturmodellen.

    m_of_l er låst til konstanten 1 (skalar psi) og bruddet til alpha * Z.
    """

    link: Link = Link.IDENTITY
    outcome_formula: Formula = DEFAULT_OUTCOME_FORMULA
    instrument_formula: Formula = DEFAULT_INSTRUMENT_FORMULA
    m_of_l: str = "constant"
    violation_form: str = "linear"

    def __post_init__(self):
        if not isinstance(self.link, Link):
            object.__setattr__(self, "link", Link(self.link))
        object.__setattr__(self, "outcome_formula", tuple(self.outcome_formula))
        object.__setattr__(self, "instrument_formula", tuple(self.instrument_formula))
        if self.m_of_l != "constant":
            raise ValueError(f"Bare m(L) = 1 støttes, fikk {self.m_of_l!r}")
        if self.violation_form != "linear":
            raise ValueError(f"Bare bruddet alpha * Z støttes, fikk {self.violation_form!r}")

    @property
    def needs_outcome_model(self) -> bool:
        return self.link is Link.LOGIT

    def violation(self, data: Dataset, alpha: float) -> np.ndarray:
        """b(L, Z; alpha) = alpha * Z"""
        return alpha * data.z


def h_psi_alpha(
    data: Dataset,
    psi: float,
    alpha: float,
    spec: SmmSpec,
    outcome: Optional[OutcomeModel] = None,
    check_domain: bool = False,
) -> np.ndarray:
    """
    Residualtransformasjonen h(psi; alpha) per rad.

    identity: Y - X psi - b
    log:      Y exp(-X psi - b)
    logit:    expit(logit E^[Y | X, Z, L] - X psi - b)

    Args:
        data: Datasett (én eller flere rader)
        psi, alpha: Effekt og sensitivitetsparameter
        spec: Modellbeskrivelse
        outcome: Tilpasset utfallsmodell; påkrevd for logit
        check_domain: Valider at data passer linken

    Raises:
        MissingOutcomeModelError: logit uten utfallsmodell
        DomainError: Data utenfor linkens definisjonsområde (med check_domain)
    """
    b = spec.violation(data, alpha)
    if spec.link is Link.IDENTITY:
        return data.y - data.x * psi - b

    if spec.link is Link.LOG:
        if check_domain:
            if np.any(data.y < 0):
                raise DomainError("Log-link krever ikke-negativ Y")
            if outcome is not None:
                fitted = outcome.predict(data)
                if np.any((fitted <= 0) | (fitted >= 1)):
                    raise DomainError("Utfallsmodellen gir predikerte verdier utenfor (0, 1)")
        return data.y * np.exp(-data.x * psi - b)

    if outcome is None:
        raise MissingOutcomeModelError("Logit-link krever en tilpasset utfallsmodell")
    if check_domain and not data.y_is_binary:
        raise DomainError("Logit-link krever y i {0, 1}")
    return expit(outcome.linear_predictor(data) - data.x * psi - b)


def d_function(data: Dataset, instrument: InstrumentModel) -> np.ndarray:
    """D = Z - E^[Z | L]"""
    return data.z - instrument.predict(data)


def build_stacked_system(
    data: Dataset,
    spec: SmmSpec,
    include_outcome: Optional[bool] = None,
) -> StackedSystem:
    """
    Stabler nuisance-ligningene og psi-ligningen D * h.

    theta = (beta_Y, mu_Z, psi) for logit og (mu_Z, psi) ellers. Med
    include_outcome=True tas en lineær utfallsmodell med også for identity
    og log; den påvirker ikke psi-raden.

    Raises:
        DomainError: logit-link med ikke-binær y
    """
    if include_outcome is None:
        include_outcome = spec.needs_outcome_model
    if spec.link is Link.LOGIT:
        if not data.y_is_binary:
            raise DomainError("Logit-link krever y i {0, 1}")
        if not include_outcome:
            raise MissingOutcomeModelError("Logit-link krever utfallsmodellen i systemet")

    outcome_family = "logistic" if spec.link is Link.LOGIT else "linear"
    z_family = instrument_family(data, spec.instrument_formula)
    k_beta = len(spec.outcome_formula) if include_outcome else 0
    k_mu = len(spec.instrument_formula)

    partition: Dict[str, slice] = {}
    if include_outcome:
        partition["beta_y"] = slice(0, k_beta)
    partition["mu_z"] = slice(k_beta, k_beta + k_mu)
    partition["psi"] = slice(k_beta + k_mu, k_beta + k_mu + 1)

    def q_fn(rows: Dataset, theta: np.ndarray, alpha: float) -> np.ndarray:
        beta = theta[partition["beta_y"]] if include_outcome else None
        mu = theta[partition["mu_z"]]
        psi = theta[-1]
        instrument = InstrumentModel(coef=mu, formula=spec.instrument_formula, family=z_family)
        columns = []
        outcome = None
        if include_outcome:
            outcome = OutcomeModel(beta=beta, formula=spec.outcome_formula, family=outcome_family)
            columns.append(outcome.scores(rows))
        columns.append(instrument.scores(rows))
        h = h_psi_alpha(rows, psi, alpha, spec, outcome if spec.link is Link.LOGIT else None)
        columns.append((d_function(rows, instrument) * h)[:, None])
        return np.hstack(columns)

    dim_p = k_beta + k_mu + 1
    logger.debug(f"Stablet system for link={spec.link.value}: p={dim_p}, deler={list(partition)}")
    return StackedSystem(q_fn=q_fn, dim_p=dim_p, partition=partition)

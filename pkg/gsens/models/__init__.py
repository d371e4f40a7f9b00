from .base import NuisanceModel, design_matrix, newton_logistic
from .instrument import DEFAULT_INSTRUMENT_FORMULA, InstrumentModel, fit_instrument_model
from .outcome import DEFAULT_OUTCOME_FORMULA, OutcomeModel, fit_outcome_model
from .smm import SmmSpec, build_stacked_system, d_function, h_psi_alpha

__all__ = [
    "NuisanceModel",
    "design_matrix",
    "newton_logistic",
    "DEFAULT_INSTRUMENT_FORMULA",
    "InstrumentModel",
    "fit_instrument_model",
    "DEFAULT_OUTCOME_FORMULA",
    "OutcomeModel",
    "fit_outcome_model",
    "SmmSpec",
    "build_stacked_system",
    "d_function",
    "h_psi_alpha",
]

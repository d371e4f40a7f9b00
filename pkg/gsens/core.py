"""Exception hierarchy for gsens."""

from typing import Optional


class GSensError(Exception):
    """Base exception for gsens-related errors."""
    pass


class ConfigError(GSensError):
    """Configuration-related errors. Bærer navnet på feltet som feilet."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ReportIOError(GSensError):
    """Rapporten kunne ikke skrives."""
    pass


# Datafeil

class DataError(GSensError):
    """Data-related errors."""
    pass


class MissingColumnError(DataError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"Mangler kolonne: {column}")


class ParseError(DataError):
    def __init__(self, row: int, column: str, value: object):
        self.row = row
        self.column = column
        super().__init__(
            f"Kunne ikke tolke verdien {value!r} i rad {row}, kolonne {column}"
        )


class EmptyDataError(DataError):
    pass


class DomainError(DataError):
    """Dataene passer ikke med valgt link-funksjon."""
    pass


# Estimeringsfeil

class EstimationError(GSensError):
    """Numerical or model-fitting errors."""
    pass


class NonFiniteError(EstimationError):
    pass


class SingularBreadError(EstimationError):
    def __init__(self, pivot: float, index: Optional[int] = None):
        self.pivot = pivot
        self.index = index
        super().__init__(f"Singulær bread-matrise (pivot {pivot:.3e} i kolonne {index})")


class NegativeVarianceError(EstimationError):
    pass


class MissingOutcomeModelError(EstimationError):
    pass


class SeparationError(EstimationError):
    pass


class RankDeficientError(EstimationError):
    pass


class WeakInstrumentError(EstimationError):
    pass


class NoConvergenceError(EstimationError):
    pass


class UnreachableError(EstimationError):
    pass


class UnsupportedCombinationError(EstimationError):
    pass

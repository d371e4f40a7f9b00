"""CSV ingestion and export of datasets."""

import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Union

import numpy as np
import pandas as pd
import psutil

from ..core import DataError, EmptyDataError, MissingColumnError, ParseError, ReportIOError
from .dataset import Dataset

# Andel av totalminnet et innlest datasett kan bruke før vi varsler
MEMORY_SETTINGS = {
    "warning_threshold": 0.25,
    "critical_threshold": 0.50,
}


class DatasetLoader:
    """Leser CSV-filer til Dataset med validering av kolonner og verdier"""

    def __init__(self, column_map: Mapping[str, Any], standardize_exposure: bool = False):
        """
        Args:
            column_map: {"y": navn, "x": navn, "z": navn, "l": [navn, ...]}; y kan være None
            standardize_exposure: Del X på utvalgsstandardavviket (ddof=1)
        """
        self.logger = logging.getLogger(self.__class__.__name__)
        for role in ("x", "z"):
            if not column_map.get(role):
                raise MissingColumnError(role)
        self.column_map = dict(column_map)
        self.covariates: List[str] = list(column_map.get("l") or [])
        self.standardize_exposure = standardize_exposure

    def load(self, path: Union[str, Path]) -> Dataset:
        """
        Leser og validerer en CSV-fil.

        Returns:
            Dataset med radene uten manglende verdier

        Raises:
            MissingColumnError: En mappet kolonne finnes ikke i filen
            ParseError: En verdi kan ikke tolkes som tall (rad- og kolonneindeksert)
            EmptyDataError: Ingen rader igjen
        """
        path = Path(path)
        try:
            raw = pd.read_csv(path, dtype=str)
        except FileNotFoundError:
            raise DataError(f"Fant ikke filen {path}")
        except pd.errors.EmptyDataError:
            raise EmptyDataError(f"Tom fil: {path}")

        mapped = self._mapped_columns()
        for column in mapped:
            if column not in raw.columns:
                self.logger.error(f"Mangler kolonne {column} i {path}")
                raise MissingColumnError(column)

        if raw.empty:
            raise EmptyDataError(f"Ingen datarader i {path}")

        frame = self._parse_numeric(raw[mapped])

        # Forkast rader med manglende verdier
        complete = frame.notna().all(axis=1)
        dropped = int((~complete).sum())
        if dropped:
            self.logger.warning(f"Forkastet {dropped} rader med manglende verdier")
        frame = frame[complete]
        if frame.empty:
            raise EmptyDataError(f"Alle rader i {path} mangler verdier")

        self._check_memory_usage(frame)

        x = frame[self.column_map["x"]].to_numpy(dtype=float)
        if self.standardize_exposure:
            sd = float(np.std(x, ddof=1)) if len(x) > 1 else 0.0
            if sd <= 0:
                raise DataError("Kan ikke standardisere en konstant eksponering")
            x = x / sd

        y_name = self.column_map.get("y")
        y = frame[y_name].to_numpy(dtype=float) if y_name else np.zeros(len(frame))

        dataset = Dataset(
            y=y,
            x=x,
            z=frame[self.column_map["z"]].to_numpy(dtype=float),
            l=frame[self.covariates].to_numpy(dtype=float) if self.covariates else None,
            covariate_names=tuple(self.covariates),
        )
        self.logger.info(f"Leste {dataset.n} rader fra {path}")
        return dataset

    def _mapped_columns(self) -> List[str]:
        columns = [self.column_map[role] for role in ("y", "x", "z") if self.column_map.get(role)]
        columns += self.covariates
        # Samme kolonne kan brukes i flere roller
        return list(dict.fromkeys(columns))

    def _parse_numeric(self, raw: pd.DataFrame) -> pd.DataFrame:
        """Konverterer til flyttall; tomme celler blir NaN, ugyldig tekst gir ParseError"""
        parsed = {}
        for column in raw.columns:
            values = np.empty(len(raw))
            for row, cell in enumerate(raw[column].to_numpy()):
                if pd.isna(cell) or not str(cell).strip():
                    values[row] = np.nan
                    continue
                try:
                    values[row] = float(cell)
                except ValueError:
                    raise ParseError(row + 1, column, cell)
            parsed[column] = values
        return pd.DataFrame(parsed, index=raw.index)

    def _check_memory_usage(self, df: pd.DataFrame) -> None:
        """Sjekker minnebruk og gir advarsler ved høyt forbruk"""
        try:
            usage_ratio = df.memory_usage(deep=True).sum() / psutil.virtual_memory().total
            if usage_ratio >= MEMORY_SETTINGS["critical_threshold"]:
                self.logger.critical(f"Kritisk høy minnebruk: {usage_ratio:.2%}")
            elif usage_ratio >= MEMORY_SETTINGS["warning_threshold"]:
                self.logger.warning(f"Høy minnebruk: {usage_ratio:.2%}")
        except Exception as e:
            self.logger.error(f"Feil i minnesjekk: {str(e)}")


def load_csv(
    path: Union[str, Path],
    column_map: Mapping[str, Any],
    standardize_exposure: bool = False,
) -> Dataset:
    """Leser et Dataset fra CSV med gitt kolonnemapping."""
    return DatasetLoader(column_map, standardize_exposure).load(path)


def save_csv(dataset: Dataset, path: Union[str, Path]) -> Dict[str, Any]:
    """
    Skriver datasettet som CSV med kolonnene y, x, z og konfundernavnene.

    Returns:
        Kolonnemappingen som leser filen tilbake med load_csv
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        # Pandas skriver flyttall med korteste eksakte representasjon
        dataset.to_frame().to_csv(path, index=False)
    except OSError as e:
        raise ReportIOError(f"Kunne ikke skrive {path}: {e}")
    return {"y": "y", "x": "x", "z": "z", "l": list(dataset.covariate_names)}


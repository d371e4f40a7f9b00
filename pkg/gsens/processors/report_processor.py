"""Turns results into tables and writes them as CSV or JSON."""

import json
import logging
import math
import sys
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from ..analyzers import GEstimate, RelevanceResult, SweepResult
from ..config import OutputFormat, RunConfig
from ..core import ReportIOError
from ..simulation import LinearDgpConfig, LogisticDgpConfig, MonteCarloReport

logger = logging.getLogger(__name__)

# Tre desimaler i CSV
CSV_FLOAT_FORMAT = "%.3f"

Report = Union[GEstimate, SweepResult, MonteCarloReport, RelevanceResult, LinearDgpConfig, LogisticDgpConfig]


def _jsonable(value: Any) -> Any:
    """Konverterer numpy-typer og NaN/inf til JSON-kompatible verdier"""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if hasattr(value, "value") and not isinstance(value, (int, str)):
        return value.value
    return value


class ReportProcessor:
    """Bygger rapporttabeller og skriver dem til fil eller stdout"""

    def __init__(self, config: Optional[RunConfig] = None, version: Optional[str] = None):
        self.config = config
        self.version = version
        self.logger = logging.getLogger(self.__class__.__name__)

    def build_table(self, report: Report) -> pd.DataFrame:
        """Tabell med fast kolonnerekkefølge for rapporttypen"""
        if isinstance(report, SweepResult):
            return report.to_frame()
        if isinstance(report, GEstimate):
            return pd.DataFrame([report.to_record()])
        if isinstance(report, MonteCarloReport):
            return report.to_frame()
        if isinstance(report, RelevanceResult):
            return report.to_frame()
        if isinstance(report, (LinearDgpConfig, LogisticDgpConfig)):
            record = asdict(report)
            record["implied_alpha"] = report.implied_alpha()
            record["implied_p_x"] = report.implied_p_x()
            if isinstance(report, LogisticDgpConfig):
                record["implied_p_y"] = report.implied_p_y()
            else:
                record["first_stage_slope"] = report.first_stage_slope()
            return pd.DataFrame([record])
        raise TypeError(f"Ukjent rapporttype: {type(report).__name__}")

    def build_document(self, report: Report) -> Dict[str, Any]:
        """JSON-dokument med full presisjon, ekstra felt og metadata"""
        if isinstance(report, MonteCarloReport):
            rows = report.to_frame(extended=True)
        else:
            rows = self.build_table(report)
        document: Dict[str, Any] = {"rows": rows.to_dict(orient="records")}

        if isinstance(report, SweepResult):
            document["solvable_range"] = report.solvable_range
            document["psi_bounds"] = report.psi_bounds()
            document["sign_stable"] = report.sign_stable
            document["diagnostics"] = [e.diagnostics for e in report.entries]
        elif isinstance(report, GEstimate):
            document["theta"] = report.theta
            document["covariance"] = report.cov.variance if report.cov is not None else None
            document["diagnostics"] = report.diagnostics
        elif isinstance(report, MonteCarloReport):
            document["simulation"] = report.metadata()

        document["metadata"] = self._metadata(report)
        return _jsonable(document)

    def _metadata(self, report: Report) -> Dict[str, Any]:
        seed = None
        if isinstance(report, MonteCarloReport):
            seed = report.master_seed
        elif self.config is not None and self.config.simulation is not None:
            seed = self.config.simulation.master_seed
        return {
            "version": self.version,
            "seed": seed,
            "config": self.config.to_mapping() if self.config is not None else None,
        }

    def emit(self, report: Report, fmt: OutputFormat = OutputFormat.CSV, path: Optional[Path] = None) -> str:
        """
        Skriver rapporten.

        Args:
            report: Resultatobjekt
            fmt: CSV (3 desimaler, fast kolonnerekkefølge) eller JSON (full presisjon)
            path: Utfil; None skriver til stdout

        Returns:
            Teksten som ble skrevet

        Raises:
            ReportIOError: Filen kunne ikke skrives
        """
        if fmt is OutputFormat.CSV:
            table = self.build_table(report)
            if table.empty:
                raise ValueError("Rapporten er tom")
            text = table.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, na_rep="", lineterminator="\n")
        else:
            text = json.dumps(self.build_document(report), indent=2, allow_nan=False) + "\n"

        if path is None:
            sys.stdout.write(text)
            return text

        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
        except OSError as e:
            self.logger.error(f"Kunne ikke skrive rapport til {path}: {str(e)}")
            raise ReportIOError(f"Kunne ikke skrive {path}: {e}")
        self.logger.info(f"Skrev {fmt.value}-rapport til {path}")
        return text


def emit_report(
    report: Report,
    fmt: OutputFormat = OutputFormat.CSV,
    path: Optional[Path] = None,
    config: Optional[RunConfig] = None,
    version: Optional[str] = None,
) -> str:
    """Skriver en rapport som CSV eller JSON (se ReportProcessor.emit)"""
    return ReportProcessor(config, version).emit(report, fmt, path)

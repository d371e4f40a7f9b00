"""Bracketed scalar root finding for the profile G-estimating equation."""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from ..core import NonFiniteError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RootResult:
    """Resultat av rotsøk. `root` er None når funksjonen ikke skifter fortegn."""

    root: Optional[float]
    residual: float
    roots: Tuple[float, ...]
    bracket: Tuple[float, float]

    @property
    def solved(self) -> bool:
        return self.root is not None

    @property
    def multiplicity(self) -> int:
        return len(self.roots)


def solve_scalar_root(
    f: Callable[[float], float],
    bracket: Tuple[float, float] = (-10.0, 10.0),
    tol: float = 1e-10,
    scan_points: int = 101,
) -> RootResult:
    """
    Finner en rot av f på intervallet ved skanning og Brent-forfining.

    Intervallet skannes i `scan_points` jevnt fordelte punkter. Hvert
    fortegnsskifte forfines med scipy.optimize.brentq (bisection/sekant/
    invers kvadratisk interpolasjon). Ved flere røtter velges den med minst
    absoluttverdi; alle røttene ligger i `roots`.

    Args:
        f: Reell funksjon av én variabel
        bracket: (nedre, øvre) med nedre < øvre
        tol: Krav til |f(rot)|
        scan_points: Antall skannepunkter

    Returns:
        RootResult; root er None hvis ingen rot ble funnet

    Raises:
        NonFiniteError: f gir en ikke-endelig verdi i intervallet
    """
    lower, upper = float(bracket[0]), float(bracket[1])
    if not lower < upper:
        raise ValueError(f"Ugyldig intervall: {bracket}")

    def checked(x: float) -> float:
        value = float(f(x))
        if not np.isfinite(value):
            raise NonFiniteError(f"Ikke-endelig funksjonsverdi {value} i x={x}")
        return value

    grid = np.linspace(lower, upper, scan_points)
    values = np.array([checked(x) for x in grid])

    roots = [float(x) for x, v in zip(grid, values) if v == 0.0]
    for i in np.flatnonzero(values[:-1] * values[1:] < 0):
        a, b = grid[i], grid[i + 1]
        x = brentq(checked, a, b, xtol=tol * 1e-4, maxiter=200)
        if abs(checked(x)) <= tol:
            roots.append(float(x))
        else:
            # Fortegnsskifte uten nullpunkt (diskontinuitet)
            logger.debug(f"Forkastet fortegnsskifte i [{a:.4f}, {b:.4f}], |f|={abs(checked(x)):.3e}")

    if not roots:
        logger.debug(f"Ingen rot i [{lower}, {upper}]")
        return RootResult(root=None, residual=float("nan"), roots=(), bracket=(lower, upper))

    roots.sort()
    root = min(roots, key=abs)
    if len(roots) > 1:
        logger.warning(f"Fant {len(roots)} røtter {roots}; bruker {root:.6g}")
    return RootResult(root=root, residual=abs(checked(root)), roots=tuple(roots), bracket=(lower, upper))

"""Columnar observation container used by every fit."""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..core import DataError, EmptyDataError


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Observasjoner (Y, X, Z, L) som flyttallskolonner.

    `l` er en n x k-matrise; k = 0 betyr ingen målte konfundere.
    """

    y: np.ndarray
    x: np.ndarray
    z: np.ndarray
    l: Optional[np.ndarray] = None
    covariate_names: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        y = np.array(self.y, dtype=float).ravel()
        x = np.array(self.x, dtype=float).ravel()
        z = np.array(self.z, dtype=float).ravel()
        n = len(y)
        if n == 0:
            raise EmptyDataError("Datasettet har ingen rader")
        if len(x) != n or len(z) != n:
            raise DataError(f"Ulik kolonnelengde: y={n}, x={len(x)}, z={len(z)}")

        if self.l is None:
            l = np.empty((n, 0))
        else:
            l = np.array(self.l, dtype=float)
            if l.ndim == 1:
                l = l[:, None]
            if l.shape[0] != n:
                raise DataError(f"Konfundermatrisen har {l.shape[0]} rader, forventet {n}")

        names = tuple(self.covariate_names)
        if not names and l.shape[1]:
            names = tuple(f"l{j}" for j in range(l.shape[1]))
        if len(names) != l.shape[1]:
            raise DataError(f"{len(names)} konfundernavn for {l.shape[1]} kolonner")

        for name, column in (("y", y), ("x", x), ("z", z), ("l", l)):
            if not np.all(np.isfinite(column)):
                raise DataError(f"Kolonne {name} inneholder manglende eller ikke-endelige verdier")

        for array in (y, x, z, l):
            array.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "covariate_names", names)

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def y_is_binary(self) -> bool:
        return bool(np.all((self.y == 0) | (self.y == 1)))

    @property
    def z_is_binary(self) -> bool:
        return bool(np.all((self.z == 0) | (self.z == 1)))

    def covariate(self, name: str) -> np.ndarray:
        try:
            return self.l[:, self.covariate_names.index(name)]
        except ValueError:
            raise DataError(f"Ukjent konfunder: {name}")

    def take(self, rows: Sequence[int]) -> "Dataset":
        """Delmengde av radene (f.eks. én observasjon)"""
        idx = np.asarray(rows, dtype=int)
        return Dataset(
            y=self.y[idx], x=self.x[idx], z=self.z[idx], l=self.l[idx],
            covariate_names=self.covariate_names,
        )

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"y": self.y, "x": self.x, "z": self.z})
        for j, name in enumerate(self.covariate_names):
            frame[name] = self.l[:, j]
        return frame

    def equals(self, other: "Dataset") -> bool:
        return (
            self.covariate_names == other.covariate_names
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
            and np.array_equal(self.l, other.l)
        )

# app/monodromy/lattice.py
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.errors import InfeasibleLoopError, PreconditionError, SnapAmbiguityError
from app.core.models import JointSpectrum

logger = logging.getLogger(__name__)


class SpectralLattice(BaseModel):
    """
    Joint spectrum at fixed n as points (m, g), one column per m.

    Positions inside a column are measured in that column's local spacing:
    `position` maps g to a fractional level index, linear between neighbouring
    points and extrapolated with the end gap beyond the first and last point.
    Indices outside the column are virtual levels; they carry a g from the same
    extrapolation but are never anchors.
    """

    model_config = ConfigDict(frozen=True)

    n: int
    columns: dict[int, tuple[float, ...]]   # m → ascending g
    scaling: float                          # mean within-column spacing

    @property
    def size(self) -> int:
        return sum(len(c) for c in self.columns.values())

    def points(self) -> list[tuple[int, float]]:
        return [(m, g) for m in sorted(self.columns) for g in self.columns[m]]

    def column(self, m: int) -> np.ndarray:
        if m not in self.columns:
            raise InfeasibleLoopError(f"column m={m} is outside the lattice (|m| <= {self.n - 1})")
        return np.asarray(self.columns[m])

    def exists(self, m: int, k: int) -> bool:
        return m in self.columns and 0 <= k < len(self.columns[m])

    def _end_gaps(self, ys: np.ndarray) -> tuple[float, float]:
        if len(ys) == 1:
            return self.scaling, self.scaling
        return float(ys[1] - ys[0]), float(ys[-1] - ys[-2])

    def value(self, m: int, k: int) -> float:
        """g of level k in column m; virtual levels continue the end spacing."""
        ys = self.column(m)
        if 0 <= k < len(ys):
            return float(ys[k])
        gap_lo, gap_hi = self._end_gaps(ys)
        if k < 0:
            return float(ys[0] + k * gap_lo)
        return float(ys[-1] + (k - len(ys) + 1) * gap_hi)

    def y(self, m: int, k: int) -> float:
        """Rescaled g of an existing point."""
        if not self.exists(m, k):
            column = self.columns.get(m, ())
            raise InfeasibleLoopError(f"level k={k} is outside column m={m} ({len(column)} points)")
        return self.columns[m][k] / self.scaling

    def position(self, m: int, g: float) -> float:
        """Fractional level index of height g in column m."""
        ys = self.column(m)
        gap_lo, gap_hi = self._end_gaps(ys)
        if g < ys[0]:
            return float((g - ys[0]) / gap_lo)
        if g > ys[-1]:
            return float(len(ys) - 1 + (g - ys[-1]) / gap_hi)
        if len(ys) == 1:
            return 0.0
        return float(np.interp(g, ys, np.arange(len(ys))))

    def local_spacing(self, m: int, g: float) -> float:
        """Mean gap of column m around height g."""
        ys = self.column(m)
        if len(ys) == 1:
            return self.scaling
        gaps = np.diff(ys)
        j = min(max(int(math.floor(self.position(m, g))), 0), len(gaps) - 1)
        return float(np.mean(gaps[max(j - 1, 0):j + 2]))

    def nearest(self, m: int, g: float) -> int:
        """Existing point of column m nearest to g; exact ties go to the upper point."""
        last = len(self.column(m)) - 1
        return min(max(math.floor(self.position(m, g) + 0.5), 0), last)

    def snap(self, m: int, g: float, ambiguity: float) -> int:
        """
        Level of column m nearest to g, virtual levels included.

        Distances are in local spacing: the two candidates around g sit at
        fractional distances d1 <= d2 with d1 + d2 = 1, and the snap is refused
        when d2 − d1 <= ambiguity · d2.
        """
        pos = self.position(m, g)
        k = math.floor(pos + 0.5)
        d1 = abs(pos - k)
        d2 = 1.0 - d1
        if d2 - d1 <= ambiguity * d2:
            raise SnapAmbiguityError(
                f"snap at m={m}, g={g:.6g} is ambiguous between k={math.floor(pos)} and "
                f"k={math.floor(pos) + 1}; use a finer loop"
            )
        return k


def build_lattice(spectrum: JointSpectrum) -> SpectralLattice:
    if spectrum.n < 4:
        raise PreconditionError(f"lattice transport needs n >= 4, got {spectrum.n}")
    for m in range(-(spectrum.n - 2), spectrum.n - 1):
        if not spectrum.columns.get(m):
            raise PreconditionError(f"column m={m} is empty")

    gaps = np.concatenate([np.diff(col) for col in spectrum.columns.values() if len(col) > 1])
    scaling = float(np.mean(gaps))
    logger.debug(f"lattice n={spectrum.n}: {spectrum.size} points, scaling {scaling:.6g}")
    return SpectralLattice(n=spectrum.n, columns=dict(spectrum.columns), scaling=scaling)

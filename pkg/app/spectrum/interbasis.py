# app/spectrum/interbasis.py
"""
Ĝ = L̂² + 2a êz restricted to one (n, m) block of the spherical basis |n l m⟩.

The block is a real symmetric tridiagonal matrix: L̂² is diagonal with
l(l+1), and êz only couples l to l ± 1.
"""
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from app.core.config import Settings, settings as default_settings
from app.core.models import JointSpectrum, SystemParams
from app.core.quantum_numbers import column_size, energy_from_n
from app.spectrum import tridiagonal

logger = logging.getLogger(__name__)


class TridiagonalMatrix(BaseModel):
    model_config = ConfigDict(frozen=True)

    diag: tuple[float, ...]
    offdiag: tuple[float, ...]

    @model_validator(mode="after")
    def _shape(self) -> "TridiagonalMatrix":
        if not self.diag:
            raise ValueError("matrix must have at least one row")
        if len(self.offdiag) != len(self.diag) - 1:
            raise ValueError(f"offdiag has {len(self.offdiag)} entries, expected {len(self.diag) - 1}")
        return self

    @property
    def dimension(self) -> int:
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def coupling(n: int, m: int, lam: np.ndarray, a: float) -> np.ndarray:
    """Entry between rows l and l+1, evaluated at the larger label λ = l + 1."""
    lam2 = lam.astype(float) ** 2
    return (a / n) * np.sqrt((n * n - lam2) * (lam2 - m * m) / (lam2 - 0.25))


def build_matrix(n: int, m: int, params: SystemParams) -> TridiagonalMatrix:
    size = column_size(n, m)
    ls = abs(m) + np.arange(size)
    diag = ls * (ls + 1.0)
    offdiag = coupling(n, m, ls[1:], params.a)
    return TridiagonalMatrix(diag=tuple(diag.tolist()), offdiag=tuple(offdiag.tolist()))


def eigenvalues(matrix: TridiagonalMatrix, cfg: Settings = default_settings) -> tuple[float, ...]:
    values = tridiagonal.eigenvalues(np.asarray(matrix.diag), np.asarray(matrix.offdiag), cfg)
    return tuple(values.tolist())


def joint_spectrum(n: int, params: SystemParams, cfg: Settings = default_settings) -> JointSpectrum:
    energy = energy_from_n(n)
    columns: dict[int, tuple[float, ...]] = {}
    for m in range(n):
        values = eigenvalues(build_matrix(n, m, params), cfg)
        # entries depend on m only through m²
        columns[m] = values
        columns[-m] = values

    logger.info(f"joint spectrum n={n} a={params.a:g} E={energy:.6g}: {n * n} points")
    return JointSpectrum(n=n, params=params, columns=dict(sorted(columns.items())))


# ── Limits ────────────────────────────────────────────────────────────────────

def spherical_limit_column(n: int, m: int) -> tuple[float, ...]:
    """a → 0: g → l(l+1), l = |m|..n−1."""
    size = column_size(n, m)
    return tuple(float(l * (l + 1)) for l in range(abs(m), abs(m) + size))


def parabolic_limit_column(n: int, m: int) -> tuple[float, ...]:
    """a → ∞: g/(2a) → K_z/n with K_z = −(N−1), −(N−3), …, N−1 and N = n − |m|."""
    size = column_size(n, m)
    return tuple(k / n for k in range(-(size - 1), size, 2))


def trace_defect(column: tuple[float, ...] | list[float], n: int, m: int) -> float:
    """Relative deviation of Σ g_k from Σ l(l+1); off-diagonal couplings leave the trace alone."""
    expected = math.fsum(spherical_limit_column(n, m))
    return abs(math.fsum(column) - expected) / max(1.0, abs(expected))

# app/core/models.py
import math
from typing import Iterator

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SystemParams(BaseModel):
    """Global configuration of the integrable system: foci at ±a on the z-axis, nucleus at +a."""

    model_config = ConfigDict(frozen=True)

    a: float   # focal half-distance, atomic units

    @field_validator("a")
    @classmethod
    def _finite_positive(cls, v: float) -> float:
        if not math.isfinite(v) or v <= 0:
            raise ValueError(f"focal half-distance must be finite and > 0, got {v}")
        return v

    @classmethod
    def spherical(cls) -> "SystemParams":
        """The a = 0 limit (spherical separation). Bypasses validation on purpose."""
        return cls.model_construct(a=0.0)

    @property
    def is_spherical_limit(self) -> bool:
        return self.a == 0.0

    @property
    def isolated_g(self) -> float:
        return 2.0 * self.a

    @property
    def threshold_energy(self) -> float:
        """−1/(2a): potential energy at the empty focus −a."""
        return -1.0 / (2.0 * self.a)


class QuantumNumbers(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    m: int
    k: int = Field(ge=0)   # column-local rank of g, not a global quantum number

    @model_validator(mode="after")
    def _in_range(self) -> "QuantumNumbers":
        if abs(self.m) > self.n - 1:
            raise ValueError(f"|m| = {abs(self.m)} exceeds n - 1 = {self.n - 1}")
        if self.k > self.n - abs(self.m) - 1:
            raise ValueError(f"k = {self.k} exceeds column size {self.n - abs(self.m)} - 1")
        return self


class JointPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    E: float
    g: float
    m: int


class JointSpectrum(BaseModel):
    """All joint eigenvalues (E, g, m) at one principal quantum number n."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    params: SystemParams
    columns: dict[int, tuple[float, ...]]

    @model_validator(mode="after")
    def _column_structure(self) -> "JointSpectrum":
        expected = set(range(-(self.n - 1), self.n))
        if set(self.columns) != expected:
            raise ValueError(f"columns must be exactly m = {-(self.n - 1)}..{self.n - 1}")
        for m, values in self.columns.items():
            if len(values) != self.n - abs(m):
                raise ValueError(f"column m={m} has {len(values)} entries, expected {self.n - abs(m)}")
            if any(b < a for a, b in zip(values, values[1:])):
                raise ValueError(f"column m={m} is not sorted ascending")
        return self

    @property
    def energy(self) -> float:
        return -1.0 / (2.0 * self.n**2)

    @property
    def size(self) -> int:
        return sum(len(v) for v in self.columns.values())

    def column(self, m: int) -> tuple[float, ...]:
        return self.columns[m]

    def points(self) -> Iterator[JointPoint]:
        """Points ordered by m ascending, then g ascending."""
        for m in sorted(self.columns):
            for g in self.columns[m]:
                yield JointPoint(E=self.energy, g=g, m=m)

    def to_frame(self) -> pd.DataFrame:
        rows = [(m, g) for m in sorted(self.columns) for g in self.columns[m]]
        return pd.DataFrame(rows, columns=["m", "g"])

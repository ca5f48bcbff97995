# app/classical/geometry.py
import logging
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict

from app.core.errors import PreconditionError
from app.core.models import SystemParams

logger = logging.getLogger(__name__)


def prolate_from_cartesian(r: ArrayLike, params: SystemParams) -> tuple[float, float, float]:
    """
    (ξ, η, φ) from r = (x, y, z) with r₁ = |r − a ẑ| (nucleus) and r₂ = |r + a ẑ|.

    ξ = (r₁ + r₂)/(2a) ≥ 1 and η = (r₁ − r₂)/(2a) ∈ [−1, 1], so the nucleus sits
    at (ξ, η) = (1, −1) and the empty focus at (1, 1). φ is 0 on the z-axis.
    """
    x, y, z = (float(c) for c in np.asarray(r, dtype=float))
    a = params.a
    r1 = math.hypot(x, y, z - a)
    r2 = math.hypot(x, y, z + a)
    xi = max((r1 + r2) / (2.0 * a), 1.0)
    eta = min(max((r1 - r2) / (2.0 * a), -1.0), 1.0)
    phi = math.atan2(y, x) % (2.0 * math.pi) if (x, y) != (0.0, 0.0) else 0.0
    return xi, eta, phi


# ── Critical Kepler ellipses ──────────────────────────────────────────────────

class EllipseFamilyMember(BaseModel):
    """A Kepler ellipse in the (x, z) plane, nucleus focus at (0, a), through the empty focus (0, −a)."""

    model_config = ConfigDict(frozen=True)

    t: float
    nucleus: tuple[float, float]
    second_focus: tuple[float, float]
    semi_major: float

    @property
    def focal_distance(self) -> float:
        return math.dist(self.nucleus, self.second_focus)

    @property
    def semi_minor(self) -> float:
        half = 0.5 * self.focal_distance
        return math.sqrt(max(self.semi_major**2 - half * half, 0.0))

    @property
    def eccentricity(self) -> float:
        return self.focal_distance / (2.0 * self.semi_major)

    def focal_sum(self, point: tuple[float, float]) -> float:
        return math.dist(point, self.nucleus) + math.dist(point, self.second_focus)

    def outline(self, count: int = 200) -> NDArray[np.float64]:
        """count × 2 array of (x, z) points along the ellipse."""
        center = 0.5 * (np.array(self.nucleus) + np.array(self.second_focus))
        axis = np.array(self.nucleus) - center
        norm = np.linalg.norm(axis)
        major = axis / norm if norm > 0 else np.array([0.0, 1.0])
        minor = np.array([-major[1], major[0]])
        angle = np.linspace(0.0, 2.0 * np.pi, count)
        return (
            center
            + self.semi_major * np.cos(angle)[:, None] * major
            + self.semi_minor * np.sin(angle)[:, None] * minor
        )


def critical_ellipse_family(E: float, params: SystemParams, t: float) -> EllipseFamilyMember:
    """
    Member t of the ellipses over the isolated critical value.

    The second focus lies at distance −1/E − 2a from (0, −a) in direction
    (sin t, cos t); t = π gives the collision segment on the z-axis.
    """
    threshold = params.threshold_energy
    if not E > threshold:
        raise PreconditionError(f"ellipse family needs E > −1/(2a) = {threshold:.6g}, got {E}")
    a = params.a
    reach = -1.0 / E - 2.0 * a
    second = (reach * math.sin(t), -a + reach * math.cos(t))
    return EllipseFamilyMember(t=t, nucleus=(0.0, a), second_focus=second, semi_major=-1.0 / (2.0 * E))


def sample_ellipse_family(E: float, params: SystemParams, count: int = 32) -> list[EllipseFamilyMember]:
    return [critical_ellipse_family(E, params, t) for t in np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)]


class CollisionOrbit(BaseModel):
    model_config = ConfigDict(frozen=True)

    z_nucleus: float
    z_turning: float

    @property
    def passes_empty_focus(self) -> bool:
        """The orbit swings past −a, which is what makes the isolated value exist."""
        return self.z_turning < -abs(self.z_nucleus)


def collision_orbit(E: float, params: SystemParams) -> CollisionOrbit:
    """The degenerate family member: the segment [a + 1/E, a] on the z-axis."""
    if not E < 0:
        raise PreconditionError(f"bound states only: E must be < 0, got {E}")
    return CollisionOrbit(z_nucleus=params.a, z_turning=params.a + 1.0 / E)

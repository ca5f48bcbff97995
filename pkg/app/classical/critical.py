# app/classical/critical.py
"""
Critical values of the energy–momentum map (l_z, g) at fixed energy.

A value is critical when the quartic P has a double root s₀:
P(s₀) = P'(s₀) = 0. Solving these two conditions for (l_z², g) gives a curve
parametrised by s₀; the η-branch has s₀ in (−1, 0), the ξ-branch s₀ > 1.
The isolated value (0, 2a) sits off the curves when n > √a.
"""
import logging
import math
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict
from scipy.optimize import brentq

from app.core.config import Settings, settings as default_settings
from app.core.errors import PreconditionError
from app.core.models import SystemParams

logger = logging.getLogger(__name__)


class CriticalPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    s0: float
    l_z: float   # ≥ 0; the mirror branch is (−l_z, g)
    g: float
    branch: Literal["eta", "xi"]


class IsolatedValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    l_z: float = 0.0
    g: float
    degenerate: bool   # n = √a: the value sits exactly where the curve detaches


def _check_energy(E: float) -> float:
    if not E < 0:
        raise PreconditionError(f"bound states only: E must be < 0, got {E}")
    return -1.0 / (2.0 * E)   # n² as a real number


def _l_squared(E: float, a: float, s0: NDArray[np.float64]) -> NDArray[np.float64]:
    u0 = s0 * s0 - 1.0
    return -(2.0 * a * a * E * s0 + a) * u0 * u0 / s0


def _g(E: float, a: float, s0: NDArray[np.float64]) -> NDArray[np.float64]:
    u0 = s0 * s0 - 1.0
    q0 = -(2.0 * a * a * E * s0 + a) * u0 / s0
    return 2.0 * a * a * E * u0 + 2.0 * a * s0 - q0


def critical_curve(E: float, params: SystemParams, s0: float) -> CriticalPoint | None:
    """Critical value with double root at s0, or None where l_z² < 0 (nonphysical)."""
    _check_energy(E)
    if s0 in (0.0, 1.0, -1.0):
        raise PreconditionError(f"s0 = {s0} is a limit point of the critical curve")
    if s0 < -1.0:
        raise PreconditionError(f"s0 = {s0} lies outside both coordinate ranges")

    s = np.float64(s0)
    l2 = float(_l_squared(E, params.a, s))
    if l2 < 0:
        return None
    return CriticalPoint(
        s0=s0,
        l_z=math.sqrt(l2),
        g=float(_g(E, params.a, s)),
        branch="eta" if abs(s0) < 1.0 else "xi",
    )


# ── Sampled branches ──────────────────────────────────────────────────────────

def branch_ranges(E: float, params: SystemParams) -> dict[str, tuple[float, float]]:
    """s₀ ranges of the two physical branches, cut where l_z reaches n."""
    n2 = _check_energy(E)
    a = params.a

    def excess(s: float) -> float:
        return float(_l_squared(E, a, np.float64(s))) - n2

    eta_end = brentq(excess, -1.0 + 1e-12, -1e-12)

    xi_start = max(1.0, n2 / a)
    hi = 2.0 * xi_start + 1.0
    while excess(hi) <= 0:
        hi *= 2.0
    xi_end = brentq(excess, xi_start * (1.0 + 1e-12), hi)
    return {"eta": (-1.0, float(eta_end)), "xi": (xi_start, float(xi_end))}


def _grid(start: float, end: float, samples: int) -> NDArray[np.float64]:
    # geometric toward `start`, where the curve approaches the g axis
    t = np.union1d(np.geomspace(1e-8, 1.0, samples // 2), np.linspace(0.0, 1.0, samples - samples // 2))
    return start + (end - start) * t


def sample_critical_set(
    E: float,
    params: SystemParams,
    cfg: Settings = default_settings,
) -> list[CriticalPoint]:
    """Both physical branches (l_z ≥ 0), each ordered from the g axis outward."""
    ranges = branch_ranges(E, params)
    a = params.a
    points: list[CriticalPoint] = []

    for branch in ("eta", "xi"):
        start, end = ranges[branch]
        s = _grid(start, end, cfg.critical_curve_samples)
        l2 = _l_squared(E, a, s)
        g = _g(E, a, s)
        for s0, l2_k, g_k in zip(s, l2, g):
            points.append(CriticalPoint(s0=float(s0), l_z=math.sqrt(max(float(l2_k), 0.0)), g=float(g_k), branch=branch))

    logger.debug(f"critical set E={E:.6g} a={a:g}: {len(points)} samples, ranges {ranges}")
    return points


def critical_envelope(
    E: float,
    params: SystemParams,
    l_values: ArrayLike,
    cfg: Settings = default_settings,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Lower (η-branch) and upper (ξ-branch) boundary of the image at each |l_z|; NaN beyond |l_z| = n."""
    l_values = np.abs(np.asarray(l_values, dtype=float))
    points = sample_critical_set(E, params, cfg)
    bounds = []
    for branch in ("eta", "xi"):
        curve = sorted((p.l_z, p.g) for p in points if p.branch == branch)
        ls, gs = np.array(curve).T
        bounds.append(np.interp(l_values, ls, gs, left=np.nan, right=np.nan))
    return bounds[0], bounds[1]


def isolated_critical_value(n: float, params: SystemParams, cfg: Settings = default_settings) -> IsolatedValue | None:
    if not n > 0:
        raise PreconditionError(f"n must be > 0, got {n}")
    ratio = n * n / params.a
    if abs(ratio - 1.0) <= cfg.bifurcation_rtol:
        return IsolatedValue(g=params.isolated_g, degenerate=True)
    if ratio > 1.0:
        return IsolatedValue(g=params.isolated_g, degenerate=False)
    return None

# app/classical/reduction.py
"""
Singular reduction of the Kepler problem by the L_z symmetry.

Starting from the so(4) pair (L, K) with L·K = 0 and |L|² + |K|² = n², the
invariants ρ₁ = K_z, ρ₂ = L_x² + L_y² − K_x² − K_y², ρ₃ = K_x L_y − K_y L_x
carry the Poisson structure {ρ₁,ρ₂} = 2ρ₃, {ρ₁,ρ₃} = −2ρ₂,
{ρ₂,ρ₃} = 4ρ₁(n² + m² − ρ₁²). The reduced phase space at L_z = m is the
surface C = 0, singular at (±n, 0, 0) when m = 0.
"""
import logging
import math
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict
from scipy.optimize import minimize_scalar

from app.core.config import Settings, settings as default_settings
from app.core.errors import PreconditionError
from app.core.models import SystemParams

logger = logging.getLogger(__name__)

SingularPointKind = Literal["pinched_torus", "elliptic_equilibrium", "degenerate_bifurcation"]

Vector3 = tuple[float, float, float]


class CartesianState(BaseModel):
    model_config = ConfigDict(frozen=True)

    L: Vector3   # angular momentum
    K: Vector3   # n × eccentricity vector

    def casimir_defects(self, n: float) -> tuple[float, float]:
        """(L·K, |L|² + |K|² − n²); both vanish on shell."""
        L, K = np.array(self.L), np.array(self.K)
        return float(L @ K), float(L @ L + K @ K - n * n)


class ReducedPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    rho1: float
    rho2: float
    rho3: float
    n: float
    m: float
    casimir_residual: float = 0.0

    @property
    def vector(self) -> NDArray[np.float64]:
        return np.array([self.rho1, self.rho2, self.rho3])


def _section_factor(n: float, m: float, rho1: ArrayLike) -> NDArray[np.float64]:
    """F(ρ₁) = (n² − (m + ρ₁)²)(n² − (m − ρ₁)²); the surface C = 0 is ρ₂² + ρ₃² = F."""
    rho1 = np.asarray(rho1, dtype=float)
    return (n * n - (m + rho1) ** 2) * (n * n - (m - rho1) ** 2)


def casimir(p: ReducedPoint) -> float:
    return float(_section_factor(p.n, p.m, p.rho1)) - p.rho2**2 - p.rho3**2


def casimir_gradient(p: ReducedPoint) -> NDArray[np.float64]:
    n2, m, r1 = p.n * p.n, p.m, p.rho1
    d1 = -2.0 * (m + r1) * (n2 - (m - r1) ** 2) + 2.0 * (m - r1) * (n2 - (m + r1) ** 2)
    return np.array([d1, -2.0 * p.rho2, -2.0 * p.rho3])


def reduce(state: CartesianState, n: float, m: float, cfg: Settings = default_settings) -> ReducedPoint:
    dot, norm = state.casimir_defects(n)
    scale = max(1.0, n * n)
    if abs(dot) > cfg.casimir_tol * scale or abs(norm) > cfg.casimir_tol * scale:
        raise PreconditionError(f"state is off shell: L·K = {dot:.3e}, |L|² + |K|² − n² = {norm:.3e}")
    if abs(state.L[2] - m) > cfg.casimir_tol * max(1.0, n):
        raise PreconditionError(f"L_z = {state.L[2]} does not match m = {m}")

    (lx, ly, _), (kx, ky, kz) = state.L, state.K
    point = ReducedPoint(
        rho1=kz,
        rho2=lx * lx + ly * ly - kx * kx - ky * ky,
        rho3=kx * ly - ky * lx,
        n=n,
        m=m,
    )
    return point.model_copy(update={"casimir_residual": casimir(point)})


# ── Poisson structure ─────────────────────────────────────────────────────────

def _tensor(rho: NDArray[np.float64], n: float, m: float) -> NDArray[np.float64]:
    r1, r2, r3 = rho
    c = 4.0 * r1 * (n * n + m * m - r1 * r1)
    return np.array([
        [0.0, 2.0 * r3, -2.0 * r2],
        [-2.0 * r3, 0.0, c],
        [2.0 * r2, -c, 0.0],
    ])


def structure_matrix(p: ReducedPoint) -> NDArray[np.float64]:
    return _tensor(p.vector, p.n, p.m)


def casimir_annihilation(p: ReducedPoint) -> float:
    """|J·∇C| relative to |J|·|∇C|."""
    J = structure_matrix(p)
    grad = casimir_gradient(p)
    size = np.linalg.norm(J) * np.linalg.norm(grad)
    return float(np.linalg.norm(J @ grad) / max(1.0, size))


def jacobi_residual(p: ReducedPoint) -> float:
    """Cyclic sum {ρ₁,{ρ₂,ρ₃}} + … by central differences, relative to the size of its terms."""
    rho = p.vector
    J = _tensor(rho, p.n, p.m)
    dJ = np.empty((3, 3, 3))   # dJ[l] = ∂J/∂ρ_l
    for l in range(3):
        h = 1e-6 * max(1.0, abs(rho[l]), p.n)
        step = np.zeros(3)
        step[l] = h
        dJ[l] = (_tensor(rho + step, p.n, p.m) - _tensor(rho - step, p.n, p.m)) / (2.0 * h)

    i, j, k = 0, 1, 2
    terms = np.array([
        J[i] @ dJ[:, j, k],
        J[j] @ dJ[:, k, i],
        J[k] @ dJ[:, i, j],
    ])
    magnitude = sum(np.abs(J[a]) @ np.abs(dJ[:, b, c]) for a, b, c in ((i, j, k), (j, k, i), (k, i, j)))
    return float(abs(terms.sum()) / max(1.0, magnitude))


def sample_reduced_space(n: float, m: float, count: int, rng: np.random.Generator) -> list[ReducedPoint]:
    """Points drawn on C = 0: ρ₁ uniform, then a uniform angle on the circle ρ₂² + ρ₃² = F(ρ₁)."""
    if abs(m) > n:
        raise PreconditionError(f"|m| = {abs(m)} exceeds n = {n}")
    reach = n - abs(m)
    rho1 = rng.uniform(-reach, reach, count)
    angle = rng.uniform(0.0, 2.0 * np.pi, count)
    radius = np.sqrt(np.maximum(_section_factor(n, m, rho1), 0.0))
    return [
        ReducedPoint(rho1=r1, rho2=r * math.cos(t), rho3=r * math.sin(t), n=n, m=m)
        for r1, r, t in zip(rho1.tolist(), radius.tolist(), angle.tolist())
    ]


# ── Reduced second integral ───────────────────────────────────────────────────

def _G(rho1: ArrayLike, rho2: ArrayLike, n: float, m: float, a: float) -> NDArray[np.float64]:
    rho1 = np.asarray(rho1, dtype=float)
    return 0.5 * (np.asarray(rho2) + n * n - rho1 * rho1 + m * m) + 2.0 * a * rho1 / n


def reduced_G(p: ReducedPoint, params: SystemParams) -> float:
    return float(_G(p.rho1, p.rho2, p.n, p.m, params.a))


def g_range(n: float, m: float, params: SystemParams, samples: int = 4001) -> tuple[float, float]:
    """Image of G over the reduced space at L_z = m: the g-range of the energy–momentum map."""
    if abs(m) > n:
        raise PreconditionError(f"|m| = {abs(m)} exceeds n = {n}")
    reach = n - abs(m)
    if reach == 0:
        value = float(_G(0.0, 0.0, n, m, params.a))
        return value, value

    def upper(x: float) -> float:
        return -float(_G(x, math.sqrt(max(float(_section_factor(n, m, x)), 0.0)), n, m, params.a))

    def lower(x: float) -> float:
        return float(_G(x, -math.sqrt(max(float(_section_factor(n, m, x)), 0.0)), n, m, params.a))

    grid = np.linspace(-reach, reach, samples)
    root = np.sqrt(np.maximum(_section_factor(n, m, grid), 0.0))
    extrema = []
    for f, values in ((lower, _G(grid, -root, n, m, params.a)), (upper, -_G(grid, root, n, m, params.a))):
        k = int(np.argmin(values))
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, samples - 1)]
        best = min(float(values[k]), f(-reach), f(reach))
        if hi > lo:
            refined = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12 * max(1.0, reach)})
            best = min(best, float(refined.fun))
        extrema.append(best)
    return extrema[0], -extrema[1]


def classify_singular_point(n: float, params: SystemParams, cfg: Settings = default_settings) -> SingularPointKind:
    """
    Nature of the singular point (n, 0, 0) at m = 0.

    The level line {G = 2a} crosses it with slope 2n − 4a/n in the (ρ₁, ρ₂)
    chart; the section of C = 0 has the corner slopes ±2n there. A line
    strictly inside the cone cuts the surface into a pinched torus.
    """
    if not n > 0 or not params.a > 0:
        raise PreconditionError(f"need n > 0 and a > 0, got n={n}, a={params.a}")
    slope = 2.0 * n - 4.0 * params.a / n
    cone = 2.0 * n
    margin = cone - abs(slope)
    if abs(margin) <= cfg.bifurcation_rtol * cone:
        return "degenerate_bifurcation"
    return "pinched_torus" if margin > 0 else "elliptic_equilibrium"


# ── Slice ρ₃ = 0 ──────────────────────────────────────────────────────────────

class LevelLine(BaseModel):
    model_config = ConfigDict(frozen=True)

    g: float
    rho1: tuple[float, ...]
    rho2: tuple[float, ...]


class PhaseSpaceSlice(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: float
    m: float
    section_rho1: tuple[float, ...]   # closed curve: upper half left to right, then lower half back
    section_rho2: tuple[float, ...]
    lines: tuple[LevelLine, ...]

    @property
    def is_empty(self) -> bool:
        return not self.section_rho1


def phase_space_slice(
    n: float,
    m: float,
    params: SystemParams,
    g_values: ArrayLike,
    samples: int = 401,
) -> PhaseSpaceSlice:
    g_values = np.atleast_1d(np.asarray(g_values, dtype=float))
    if abs(m) > n:
        return PhaseSpaceSlice(n=n, m=m, section_rho1=(), section_rho2=(), lines=())

    reach = n - abs(m)
    if reach == 0:
        return PhaseSpaceSlice(n=n, m=m, section_rho1=(0.0,), section_rho2=(0.0,), lines=())

    # cosine spacing resolves the corners at ρ₁ = ±reach
    rho1 = -reach * np.cos(np.linspace(0.0, np.pi, samples))
    rho1[0], rho1[-1] = -reach, reach
    top = np.sqrt(np.maximum(_section_factor(n, m, rho1), 0.0))
    section_rho1 = np.concatenate([rho1, rho1[::-1][1:]])
    section_rho2 = np.concatenate([top, -top[::-1][1:]])

    lines = []
    for g in g_values:
        rho2 = 2.0 * g - n * n + rho1 * rho1 - m * m - 4.0 * params.a * rho1 / n
        lines.append(LevelLine(g=float(g), rho1=tuple(rho1.tolist()), rho2=tuple(rho2.tolist())))

    return PhaseSpaceSlice(
        n=n,
        m=m,
        section_rho1=tuple(section_rho1.tolist()),
        section_rho2=tuple(section_rho2.tolist()),
        lines=tuple(lines),
    )

# app/spectrum/shooting.py
"""
Shooting oracle for the separated equation

    d/ds[(s² − 1) dψ/ds] + (Q(s) − m²/(s² − 1)) ψ = 0,

shared by η ∈ [−1, 1] and ξ ∈ [1, ∞). Written as the first-order system
y' = w/u, w' = −(P/u) y with u = s² − 1 and w = u y'. Solutions start from
Frobenius series at the regular singular points s = ±1 (exponent |m|/2) and
from the decaying asymptotic form at large ξ; mismatches are normalised
Wronskians, zero exactly at eigenvalues.
"""
import logging
import math
from typing import Literal

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from app.classical.quartic import SeparationQuartic, separation_quartic, turning_points
from app.classical.reduction import g_range
from app.core.config import Settings, settings as default_settings
from app.core.errors import PreconditionError, ShootingError
from app.core.models import SystemParams
from app.core.quantum_numbers import column_size, energy_from_n

logger = logging.getLogger(__name__)

MAX_ORACLE_N = 6


class SolutionProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: tuple[float, ...]
    psi: tuple[float, ...]
    dpsi: tuple[float, ...]
    start: float
    normalization: Literal["frobenius", "asymptotic"]   # leading coefficient 1 at the start point
    residual: float   # max over grid cells of |w(s₁) − w(s₀) + ∫(P/u)ψ ds|, divided by max |w|, w = (s² − 1)ψ'


# ── Starting values ───────────────────────────────────────────────────────────

def _taylor(coefficients: tuple[float, ...], center: float, order: int) -> list[float]:
    """Taylor coefficients of P about `center`, up to `order`."""
    poly = np.array(coefficients, dtype=float)
    out = []
    for i in range(order + 1):
        out.append(float(np.polyval(poly, center)) / math.factorial(i))
        poly = np.polyder(poly) if len(poly) > 1 else np.array([0.0])
    return out


def frobenius_start(p: SeparationQuartic, boundary: float, t: float, cfg: Settings) -> tuple[float, float]:
    """
    (y, w) at s = boundary + t from ψ = |t|^σ Σ c_j t^j, σ = |m|/2, c₀ = 1.

    4j(j + 2σ) c_j = −[2s_b(j−1+σ)(2j−1+2σ) c_{j−1} + (j−2+σ)(j−1+σ) c_{j−2} + Σ_{i≥1} p_i c_{j−i}]
    """
    sigma = abs(p.l_z) / 2.0
    terms = cfg.frobenius_terms
    taylor = _taylor(p.coefficients, boundary, 4)
    c = [1.0]
    for j in range(1, terms):
        acc = 2.0 * boundary * (j - 1 + sigma) * (2 * j - 1 + 2 * sigma) * c[j - 1]
        if j >= 2:
            acc += (j - 2 + sigma) * (j - 1 + sigma) * c[j - 2]
        acc += sum(taylor[i] * c[j - i] for i in range(1, min(4, j) + 1))
        c.append(-acc / (4.0 * j * (j + 2.0 * sigma)))

    scale = abs(t) ** sigma
    psi = scale * sum(c_j * t**j for j, c_j in enumerate(c))
    dpsi = scale * sum(c_j * (j + sigma) * t ** (j - 1) for j, c_j in enumerate(c))
    u = t * (2.0 * boundary + t)
    return psi, u * dpsi


def asymptotic_start(p: SeparationQuartic, xi_max: float) -> tuple[float, float]:
    """ψ ~ s^{n−1} e^{−κs} with κ = a√(−2E) and n − 1 = a/κ − 1, normalised to ψ(ξ_max) = 1."""
    kappa = p.a * math.sqrt(-2.0 * p.E)
    beta = p.a / kappa - 1.0
    u = xi_max * xi_max - 1.0
    return 1.0, u * (beta / xi_max - kappa)


# ── Integration ───────────────────────────────────────────────────────────────

def _rhs(p: SeparationQuartic):
    c4, c3, c2, c1, c0 = p.coefficients

    def rhs(s: float, state: NDArray[np.float64]) -> list[float]:
        y, w = state
        u = (s - 1.0) * (s + 1.0)
        P = (((c4 * s + c3) * s + c2) * s + c1) * s + c0
        return [w / u, -P / u * y]

    return rhs


def _integrate(p: SeparationQuartic, start: float, end: float, state: tuple[float, float], cfg: Settings, dense: bool = False):
    sol = solve_ivp(
        _rhs(p),
        (start, end),
        list(state),
        method="DOP853",
        rtol=cfg.shoot_rtol,
        atol=cfg.shoot_atol,
        dense_output=dense,
    )
    if not sol.success:
        raise ShootingError(f"integration from s={start:.6g} to s={end:.6g} failed at s={sol.t[-1]:.6g}: {sol.message}")
    return sol


def _mismatch(left: NDArray[np.float64], right: NDArray[np.float64]) -> float:
    yl, wl = left
    yr, wr = right
    cross = yl * wr - yr * wl
    size = abs(yl * wr) + abs(yr * wl)
    return float(cross / size) if size > 0 else 0.0


def _eta_match(p: SeparationQuartic, cfg: Settings) -> float:
    tp = turning_points(p, cfg)
    if tp.eta_interval is not None:
        point = 0.5 * (tp.eta_interval[0] + tp.eta_interval[1])
    else:
        grid = np.linspace(-0.99, 0.99, 199)
        point = float(grid[np.argmax(p(grid))])
    return min(max(point, -0.99), 0.99)


def shoot_eta(E: float, g: float, m: int, params: SystemParams, cfg: Settings = default_settings) -> float:
    """Wronskian mismatch at an interior point of the solutions regular at η = −1 and η = +1."""
    p = separation_quartic(E, g, float(m), params)
    h = cfg.frobenius_step
    match = _eta_match(p, cfg)
    left = _integrate(p, -1.0 + h, match, frobenius_start(p, -1.0, h, cfg), cfg)
    right = _integrate(p, 1.0 - h, match, frobenius_start(p, 1.0, -h, cfg), cfg)
    return _mismatch(left.y[:, -1], right.y[:, -1])


def _xi_geometry(p: SeparationQuartic, cfg: Settings) -> tuple[float, float]:
    """(match point, ξ_max): match at the outer turning point."""
    kappa = p.a * math.sqrt(-2.0 * p.E)
    tp = turning_points(p, cfg)
    if tp.xi_interval is not None:
        match = tp.xi_interval[1]
    else:
        outer = [r for r in tp.roots if r > 1.0]
        match = max(outer) if outer else 1.0 + 1.0 / kappa
    match = max(match, 1.0 + 10.0 * cfg.frobenius_step)
    return match, max(1.0 + cfg.xi_max_factor / kappa, 2.0 * match)


def shoot_xi(
    E: float,
    g: float,
    m: int,
    params: SystemParams,
    cfg: Settings = default_settings,
    xi_max: float | None = None,
) -> float:
    """Mismatch between the solution regular at ξ = 1 and the one decaying at large ξ."""
    p = separation_quartic(E, g, float(m), params)
    h = cfg.frobenius_step
    match, default_max = _xi_geometry(p, cfg)
    xi_max = default_max if xi_max is None else xi_max
    inner = _integrate(p, 1.0 + h, match, frobenius_start(p, 1.0, h, cfg), cfg)
    outer = _integrate(p, xi_max, match, asymptotic_start(p, xi_max), cfg)
    return _mismatch(inner.y[:, -1], outer.y[:, -1])


def check_xi_max(E: float, g: float, m: int, params: SystemParams, cfg: Settings = default_settings) -> None:
    """Raise when doubling ξ_max moves the ξ mismatch: the asymptotic regime was not reached."""
    p = separation_quartic(E, g, float(m), params)
    _, xi_max = _xi_geometry(p, cfg)
    base = shoot_xi(E, g, m, params, cfg, xi_max)
    doubled = shoot_xi(E, g, m, params, cfg, 2.0 * xi_max)
    if abs(base - doubled) > 1e-6:
        raise ShootingError(f"ξ_max = {xi_max:.6g} too small at g={g:.6g}: mismatch {base:.3e} vs {doubled:.3e}")


# ── Profiles ──────────────────────────────────────────────────────────────────

def solution_profile(
    E: float,
    g: float,
    m: int,
    params: SystemParams,
    side: Literal["eta", "xi"] = "eta",
    points: int = 201,
    cfg: Settings = default_settings,
) -> SolutionProfile:
    """Solution started at s = −1 (η) or s = 1 (ξ), sampled up to the match point."""
    p = separation_quartic(E, g, float(m), params)
    h = cfg.frobenius_step
    if side == "eta":
        start, end, state = -1.0 + h, _eta_match(p, cfg), frobenius_start(p, -1.0, h, cfg)
    else:
        start, end, state = 1.0 + h, _xi_geometry(p, cfg)[0], frobenius_start(p, 1.0, h, cfg)
    sol = _integrate(p, start, end, state, cfg, dense=True)

    s = np.linspace(start, end, points)
    y, w = sol.sol(s)
    u = (s - 1.0) * (s + 1.0)

    # integrated form on each cell: w(s₁) − w(s₀) + ∫ (P/u) y ds = 0
    x, weights = np.polynomial.legendre.leggauss(8)
    worst = 0.0
    for s0, s1, w0, w1 in zip(s[:-1], s[1:], w[:-1], w[1:]):
        nodes = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * x
        yn = sol.sol(nodes)[0]
        un = (nodes - 1.0) * (nodes + 1.0)
        integral = 0.5 * (s1 - s0) * np.dot(weights, p(nodes) / un * yn)
        worst = max(worst, abs(w1 - w0 + integral))
    residual = worst / max(float(np.max(np.abs(w))), 1e-300)

    return SolutionProfile(
        s=tuple(s.tolist()),
        psi=tuple(y.tolist()),
        dpsi=tuple((w / u).tolist()),
        start=start,
        normalization="frobenius",
        residual=residual,
    )


# ── Spectrum ──────────────────────────────────────────────────────────────────

def _eta_roots(E: float, m: int, params: SystemParams, lo: float, hi: float, points: int, cfg: Settings) -> list[float]:
    grid = np.linspace(lo, hi, points)
    values = [shoot_eta(E, g, m, params, cfg) for g in grid]
    roots = []
    for g0, g1, f0, f1 in zip(grid, grid[1:], values, values[1:]):
        if f0 == 0.0:
            roots.append(float(g0))
        elif f0 * f1 < 0:
            roots.append(float(brentq(lambda g: shoot_eta(E, g, m, params, cfg), g0, g1, xtol=cfg.shoot_tol)))
    return roots


def _is_joint(E: float, g: float, m: int, params: SystemParams, cfg: Settings) -> bool:
    delta = 1e-5 * max(1.0, abs(g))
    below = shoot_xi(E, g - delta, m, params, cfg)
    above = shoot_xi(E, g + delta, m, params, cfg)
    return below * above <= 0


def shooting_spectrum(n: int, m: int, params: SystemParams, cfg: Settings = default_settings) -> tuple[float, ...]:
    """Joint eigenvalues g at E = −1/(2n²): roots of the η mismatch where the ξ mismatch also vanishes."""
    if n > MAX_ORACLE_N:
        raise PreconditionError(f"shooting oracle is limited to n <= {MAX_ORACLE_N}, got {n}")
    expected = column_size(n, m)
    E = energy_from_n(n)

    g_lo, g_hi = g_range(n, m, params)
    pad = 0.05 * (g_hi - g_lo) + 1.0
    points = cfg.scan_points_per_state * expected + 1

    for attempt in range(2):
        candidates = _eta_roots(E, m, params, g_lo - pad, g_hi + pad, points, cfg)
        joint = [g for g in candidates if _is_joint(E, g, m, params, cfg)]
        if len(joint) == expected:
            for g in joint:
                check_xi_max(E, g, m, params, cfg)
            logger.info(f"shooting n={n} m={m} a={params.a:g}: {expected} values")
            return tuple(sorted(joint))
        if attempt == 0:
            logger.warning(
                f"shooting n={n} m={m} a={params.a:g} found {len(joint)} of {expected} values, refining scan"
            )
            points = 2 * points - 1

    raise ShootingError(f"shooting n={n} m={m} a={params.a:g}: found {len(joint)} values, expected {expected}")

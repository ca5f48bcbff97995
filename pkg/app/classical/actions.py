# app/classical/actions.py
"""
Action integrals I_η, I_ξ and EBK quantisation.

I_s = (1/π) ∫ √P(s)/|s² − 1| ds over the allowed interval. With
s = mid + half·sin θ the endpoint square roots cancel against ds, and
Gauss–Legendre in θ converges quickly; the node count is doubled until two
successive estimates agree.
"""
import logging
import math
from functools import lru_cache

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import brentq

from app.classical.quartic import SeparationQuartic, TurningPoints, separation_quartic, turning_points
from app.classical.reduction import g_range
from app.core.config import Settings, settings as default_settings
from app.core.errors import EbkSolveError, PreconditionError
from app.core.models import JointSpectrum, SystemParams
from app.core.quantum_numbers import column_size, energy_from_n
from app.spectrum.interbasis import joint_spectrum

logger = logging.getLogger(__name__)


class ActionValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    error: float
    nodes: int
    degenerate: bool = False


class ActionTriple(BaseModel):
    model_config = ConfigDict(frozen=True)

    I_phi: float
    I_eta: float = Field(ge=0)
    I_xi: float = Field(ge=0)
    quad_error: float
    flags: tuple[str, ...] = ()

    @property
    def total(self) -> float:
        return self.I_eta + self.I_xi + abs(self.I_phi)


class EbkLabel(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    m: int
    n_eta: int = Field(ge=0)
    n_xi: int = Field(ge=0)

    @model_validator(mode="after")
    def _sum_rule(self) -> "EbkLabel":
        if self.n_eta + self.n_xi + abs(self.m) + 1 != self.n:
            raise ValueError(
                f"n_eta + n_xi + |m| + 1 = {self.n_eta + self.n_xi + abs(self.m) + 1} != n = {self.n}"
            )
        return self

    @classmethod
    def for_state(cls, n: int, m: int, n_eta: int) -> "EbkLabel":
        return cls(n=n, m=m, n_eta=n_eta, n_xi=n - abs(m) - 1 - n_eta)


# ── Quadrature ────────────────────────────────────────────────────────────────

@lru_cache(maxsize=16)
def _legendre(nodes: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    return np.polynomial.legendre.leggauss(nodes)


def _integrate(p: SeparationQuartic, lo: float, hi: float, nodes: int) -> float:
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    x, w = _legendre(nodes)
    theta = 0.5 * np.pi * x

    # distances to the endpoints without cancellation: 1 ± sin θ = 2 sin²/cos²(π/4 + θ/2)
    d_lo = 2.0 * half * np.sin(0.25 * np.pi + 0.5 * theta) ** 2
    d_hi = 2.0 * half * np.cos(0.25 * np.pi + 0.5 * theta) ** 2
    s = np.where(theta < 0, lo + d_lo, hi - d_hi)

    # P = (s − lo)(hi − s) W(s)
    quotient, _ = np.polydiv(np.array(p.coefficients), np.poly([lo, hi]))
    W = np.maximum(-np.polyval(quotient, s), 0.0)

    plus = d_lo if lo == -1.0 else s + 1.0
    if hi == 1.0:
        minus = d_hi
    elif lo == 1.0:
        minus = d_lo
    else:
        minus = np.abs(s - 1.0)

    # f(s) ds = half² cos²θ √W / (|s + 1| |s − 1|) dθ
    integrand = (half * np.cos(theta)) ** 2 * np.sqrt(W) / (plus * minus)
    # (1/π) · (π/2) from dθ = (π/2) dx
    return 0.5 * float(np.dot(w, integrand))


def action(interval: tuple[float, float] | None, p: SeparationQuartic, cfg: Settings = default_settings) -> ActionValue:
    """(1/π) ∫ √P/|s² − 1| ds over one allowed interval."""
    if interval is None:
        raise PreconditionError(f"no classically allowed interval at E={p.E:.6g} g={p.g:.6g} l_z={p.l_z:.6g}")
    lo, hi = interval
    if hi - lo <= cfg.root_pair_tol * max(1.0, abs(lo)):
        return ActionValue(value=0.0, error=0.0, nodes=0, degenerate=True)

    nodes = cfg.quad_nodes
    previous = current = _integrate(p, lo, hi, nodes)
    error = math.inf
    while 2 * nodes <= cfg.quad_max_nodes:
        nodes *= 2
        current = _integrate(p, lo, hi, nodes)
        error = abs(current - previous)
        if error < cfg.quad_tol:
            return ActionValue(value=current, error=error, nodes=nodes)
        previous = current

    logger.warning(f"action quadrature on [{lo:.6g}, {hi:.6g}] stopped at {nodes} nodes, change {error:.3e}")
    return ActionValue(value=current, error=error, nodes=nodes)


def action_triple(E: float, g: float, l_z: float, params: SystemParams, cfg: Settings = default_settings) -> ActionTriple:
    p = separation_quartic(E, g, l_z, params)
    tp = turning_points(p, cfg)
    if tp.is_empty:
        raise PreconditionError(f"(E={E:.6g}, g={g:.6g}, l_z={l_z:.6g}) is outside the energy–momentum image")
    eta = action(tp.eta_interval, p, cfg)
    xi = action(tp.xi_interval, p, cfg)
    return ActionTriple(
        I_phi=l_z,
        I_eta=eta.value,
        I_xi=xi.value,
        quad_error=eta.error + xi.error,
        flags=tp.degenerate_flags,
    )


def sum_rule_residual(E: float, g: float, l_z: float, params: SystemParams, cfg: Settings = default_settings) -> float:
    """|I_η + I_ξ + |l_z| − 1/√(−2E)|."""
    triple = action_triple(E, g, l_z, params, cfg)
    return abs(triple.total - 1.0 / math.sqrt(-2.0 * E))


# ── EBK ───────────────────────────────────────────────────────────────────────

def _eta_action(E: float, g: float, l_z: float, params: SystemParams, cfg: Settings) -> float:
    p = separation_quartic(E, g, l_z, params)
    tp: TurningPoints = turning_points(p, cfg)
    if tp.eta_interval is None:
        return 0.0
    if tp.xi_interval is None:
        # above the image: the whole of n − |l_z| sits in the η motion
        return 1.0 / math.sqrt(-2.0 * E) - abs(l_z)
    return action(tp.eta_interval, p, cfg).value


def ebk_g(
    label: EbkLabel,
    params: SystemParams,
    cfg: Settings = default_settings,
    bracket: tuple[float, float] | None = None,
) -> float:
    """g with I_η(E_n, g, m) = n_η + ½; the sum rule then gives I_ξ = n_ξ + ½."""
    E = energy_from_n(label.n)
    target = label.n_eta + 0.5
    g_lo, g_hi = bracket if bracket is not None else g_range(label.n, label.m, params)

    def residual(g: float) -> float:
        # the range ends are critical values where one action vanishes
        if g <= g_lo:
            return -target
        if g >= g_hi:
            return label.n - abs(label.m) - target
        return _eta_action(E, g, label.m, params, cfg) - target

    xtol = cfg.ebk_tol * max(1.0, abs(g_lo), abs(g_hi))
    try:
        return float(brentq(residual, g_lo, g_hi, xtol=xtol))
    except ValueError:
        logger.warning(f"EBK bracket for {label} not usable as a whole, splitting the search")

    grid = np.linspace(g_lo, g_hi, 17)
    values = [residual(g) for g in grid]
    for (a0, f0), (a1, f1) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        if f0 * f1 <= 0:
            return float(brentq(residual, a0, a1, xtol=xtol))
    raise EbkSolveError(f"no EBK root for {label} in g ∈ [{g_lo:.6g}, {g_hi:.6g}]")


def ebk_spectrum(n: int, params: SystemParams, cfg: Settings = default_settings) -> JointSpectrum:
    columns: dict[int, tuple[float, ...]] = {}
    for m in range(n):
        bracket = g_range(n, m, params)
        values = tuple(
            sorted(ebk_g(EbkLabel.for_state(n, m, k), params, cfg, bracket) for k in range(column_size(n, m)))
        )
        columns[m] = values
        columns[-m] = values
    logger.info(f"EBK spectrum n={n} a={params.a:g}: {n * n} states")
    return JointSpectrum(n=n, params=params, columns=dict(sorted(columns.items())))


def _local_spacing(column: tuple[float, ...], k: int, fallback: float) -> float:
    gaps = [column[j + 1] - column[j] for j in (k - 1, k) if 0 <= j < len(column) - 1]
    return float(np.mean(gaps)) if gaps else fallback


def ebk_comparison(n: int, params: SystemParams, cfg: Settings = default_settings) -> pd.DataFrame:
    """One row per state: m, n_eta, g_exact, g_ebk, abs_err, normalized_err."""
    exact = joint_spectrum(n, params, cfg)
    semiclassical = ebk_spectrum(n, params, cfg)

    all_gaps = [b - a for col in exact.columns.values() for a, b in zip(col, col[1:])]
    fallback = float(np.mean(all_gaps)) if all_gaps else 1.0

    rows = []
    for m in sorted(exact.columns):
        column = exact.column(m)
        for k, (g_exact, g_ebk) in enumerate(zip(column, semiclassical.column(m))):
            err = abs(g_ebk - g_exact)
            rows.append({
                "m": m,
                "n_eta": k,
                "g_exact": g_exact,
                "g_ebk": g_ebk,
                "abs_err": err,
                "normalized_err": err / _local_spacing(column, k, fallback),
            })
    return pd.DataFrame(rows, columns=["m", "n_eta", "g_exact", "g_ebk", "abs_err", "normalized_err"])

# app/classical/quartic.py
"""
The separation quartic P(s) = (2a²E(s²−1) + 2as − g)(s²−1) − l_z² shared by
the η and ξ motions, its classified real roots and the classical momentum.
"""
import logging
import math
from itertools import combinations
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict
from scipy.optimize import brentq

from app.core.config import Settings, settings as default_settings
from app.core.errors import PreconditionError
from app.core.models import SystemParams

logger = logging.getLogger(__name__)

DegenerateFlag = Literal["double_root", "axis_contact", "shared_endpoint", "split_region"]


class SeparationQuartic(BaseModel):
    model_config = ConfigDict(frozen=True)

    E: float
    g: float
    l_z: float
    a: float
    coefficients: tuple[float, float, float, float, float]   # descending degree

    def __call__(self, s: ArrayLike) -> NDArray[np.float64]:
        return np.polyval(self.coefficients, s)

    def q(self, s: ArrayLike) -> NDArray[np.float64]:
        """Q(s) = 2a²E(s²−1) + 2as − g, so that P = Q·(s²−1) − l_z²."""
        s = np.asarray(s, dtype=float)
        return 2.0 * self.a**2 * self.E * (s * s - 1.0) + 2.0 * self.a * s - self.g

    def derivative(self, s: ArrayLike) -> NDArray[np.float64]:
        return np.polyval(np.polyder(self.coefficients), s)

    def factored(self, s: ArrayLike) -> NDArray[np.float64]:
        s = np.asarray(s, dtype=float)
        return self.q(s) * (s * s - 1.0) - self.l_z**2

    def roundoff_scale(self, s: float) -> float:
        powers = np.abs(s) ** np.arange(4, -1, -1)
        return float(max(1.0, np.dot(np.abs(self.coefficients), powers)))

    def relative_discriminant(self) -> float:
        """Π|r_i − r_j|² / Π(|r_i| + |r_j|)² over all root pairs; 0 exactly for a repeated root."""
        roots = np.roots(self.coefficients)
        value = 1.0
        for r1, r2 in combinations(roots, 2):
            value *= (abs(r1 - r2) / max(abs(r1) + abs(r2), 1e-300)) ** 2
        return value


class TurningPoints(BaseModel):
    model_config = ConfigDict(frozen=True)

    eta_interval: tuple[float, float] | None
    xi_interval: tuple[float, float] | None
    roots: tuple[float, ...]
    degenerate_flags: tuple[DegenerateFlag, ...] = ()

    @property
    def is_empty(self) -> bool:
        """No classical motion: one of the two allowed regions is missing."""
        return self.eta_interval is None or self.xi_interval is None

    @property
    def is_degenerate(self) -> bool:
        return "double_root" in self.degenerate_flags

    def interval(self, side: Literal["eta", "xi"]) -> tuple[float, float] | None:
        return self.eta_interval if side == "eta" else self.xi_interval


def separation_quartic(E: float, g: float, l_z: float, params: SystemParams) -> SeparationQuartic:
    if not E < 0:
        raise PreconditionError(f"bound states only: E must be < 0, got {E}")
    if not params.a > 0:
        raise PreconditionError(f"separation quartic needs a > 0, got {params.a}")
    a = params.a
    lead = 2.0 * a * a * E
    coefficients = (lead, 2.0 * a, -2.0 * lead - g, -2.0 * a, lead + g - l_z * l_z)
    return SeparationQuartic(E=E, g=g, l_z=l_z, a=a, coefficients=coefficients)


# ── Roots ─────────────────────────────────────────────────────────────────────

def _polish(p: SeparationQuartic, r: float, cfg: Settings) -> float:
    scale = max(1.0, abs(r))
    for width in (1e-10, 1e-8, 1e-6, 1e-4):
        lo, hi = r - width * scale, r + width * scale
        if p(lo) * p(hi) < 0:
            return float(brentq(p, lo, hi, xtol=cfg.root_polish_tol))
    return r


def _merge_double(p: SeparationQuartic, group: list[float], cfg: Settings) -> float:
    """A cluster of roots is one double root of P, i.e. a root of P'."""
    lo, hi = min(group), max(group)
    width = max(hi - lo, 1e-10 * max(1.0, abs(lo)))
    lo, hi = lo - width, hi + width
    if p.derivative(lo) * p.derivative(hi) < 0:
        return float(brentq(p.derivative, lo, hi, xtol=cfg.root_polish_tol))
    return float(np.mean(group))


def real_roots(p: SeparationQuartic, cfg: Settings = default_settings) -> tuple[list[float], bool]:
    """Real roots of P, ascending, with double roots merged. Returns (roots, had_double_root)."""
    raw = np.roots(p.coefficients)
    scale = np.maximum(1.0, np.abs(raw))
    candidates = np.sort(raw[np.abs(raw.imag) <= cfg.root_pair_tol * scale].real)

    groups: list[list[float]] = []
    for r in candidates:
        if groups and r - groups[-1][-1] <= cfg.root_pair_tol * max(1.0, abs(r)):
            groups[-1].append(float(r))
        else:
            groups.append([float(r)])

    roots: list[float] = []
    double = False
    for group in groups:
        if len(group) > 1:
            double = True
            roots.append(_merge_double(p, group, cfg))
        else:
            roots.append(_polish(p, group[0], cfg))

    for i, r in enumerate(roots):
        for axis in (-1.0, 1.0):
            if abs(r - axis) <= cfg.double_root_tol:
                roots[i] = axis
    return sorted(set(roots)), double


def _allowed_pieces(p: SeparationQuartic, breaks: list[float]) -> list[tuple[float, float]]:
    """Maximal runs of consecutive break intervals on which P > 0."""
    pieces: list[tuple[float, float]] = []
    for lo, hi in zip(breaks, breaks[1:]):
        if hi <= lo or p(0.5 * (lo + hi)) <= 0:
            continue
        if pieces and pieces[-1][1] == lo:
            pieces[-1] = (pieces[-1][0], hi)
        else:
            pieces.append((lo, hi))
    return pieces


def turning_points(p: SeparationQuartic, cfg: Settings = default_settings) -> TurningPoints:
    roots, double = real_roots(p, cfg)
    flags: list[DegenerateFlag] = ["double_root"] if double else []

    eta_breaks = sorted({-1.0, 1.0, *(r for r in roots if -1.0 < r < 1.0)})
    eta_pieces = _allowed_pieces(p, eta_breaks)

    outer = [r for r in roots if r > 1.0]
    xi_pieces: list[tuple[float, float]] = []
    if outer:
        xi_breaks = sorted({1.0, *outer})
        xi_pieces = _allowed_pieces(p, xi_breaks)

    if len(eta_pieces) > 1 or len(xi_pieces) > 1:
        flags.append("split_region")
        logger.warning(
            f"allowed region split at E={p.E:.6g} g={p.g:.6g} l_z={p.l_z:.6g}: "
            f"eta {eta_pieces}, xi {xi_pieces}"
        )

    eta = max(eta_pieces, key=lambda iv: iv[1] - iv[0]) if eta_pieces else None
    xi = xi_pieces[-1] if xi_pieces else None   # the piece ending at the outermost root

    if any(iv is not None and (iv[0] in (-1.0, 1.0) or iv[1] in (-1.0, 1.0)) for iv in (eta, xi)):
        flags.append("axis_contact")
    if eta is not None and xi is not None and eta[1] == 1.0 and xi[0] == 1.0:
        # P vanishes to second order at s = 1 only when Q(1) = 2a − g = 0
        if abs(p.q(1.0)) <= cfg.root_pair_tol * max(1.0, abs(p.g)):
            flags.append("shared_endpoint")
            if "double_root" not in flags:
                flags.insert(0, "double_root")

    return TurningPoints(eta_interval=eta, xi_interval=xi, roots=tuple(roots), degenerate_flags=tuple(flags))


# ── Momentum ──────────────────────────────────────────────────────────────────

def momentum(s: float, p: SeparationQuartic) -> float:
    """p_s = √P(s)/|s² − 1|."""
    u = (s - 1.0) * (s + 1.0)
    if u == 0.0:
        raise PreconditionError("momentum is singular at s = ±1")
    value = float(p(s))
    if value < -1e-12 * p.roundoff_scale(s):
        raise PreconditionError(f"s = {s} lies in the classically forbidden region (P = {value:.3e})")
    return math.sqrt(max(value, 0.0)) / abs(u)

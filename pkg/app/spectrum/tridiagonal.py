# app/spectrum/tridiagonal.py
"""
Eigenvalues of real symmetric tridiagonal matrices.

Bisection on Sturm counts gives every eigenvalue with a certified index;
a few safeguarded Newton steps on the characteristic-polynomial recurrence
then polish each value inside its bisection bracket.
"""
import logging

import numpy as np
from numpy.typing import NDArray

from app.core.config import Settings, settings as default_settings

logger = logging.getLogger(__name__)


def gershgorin_bounds(diag: NDArray[np.float64], offdiag: NDArray[np.float64]) -> tuple[float, float]:
    radius = np.zeros_like(diag)
    radius[:-1] += np.abs(offdiag)
    radius[1:] += np.abs(offdiag)
    return float(np.min(diag - radius)), float(np.max(diag + radius))


def sturm_count(
    diag: NDArray[np.float64],
    offdiag: NDArray[np.float64],
    x: NDArray[np.float64] | float,
) -> NDArray[np.int64]:
    """Number of eigenvalues strictly below x, vectorised over x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    e2 = np.asarray(offdiag, dtype=float) ** 2
    pivmin = np.finfo(float).tiny * max(1.0, float(e2.max(initial=0.0)))

    q = diag[0] - x
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0).astype(np.int64)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        for i in range(1, len(diag)):
            q = diag[i] - x - e2[i - 1] / q
            q = np.where(np.abs(q) < pivmin, -pivmin, q)
            count += q < 0
    return count


def characteristic_ratio(
    diag: NDArray[np.float64],
    offdiag: NDArray[np.float64],
    x: NDArray[np.float64],
    cfg: Settings = default_settings,
) -> NDArray[np.float64]:
    """p(x)/p'(x) for det(T − x I), with rescaling to keep the recurrence in range."""
    e2 = np.asarray(offdiag, dtype=float) ** 2
    p_prev2 = np.ones_like(x)
    p_prev = diag[0] - x
    dp_prev2 = np.zeros_like(x)
    dp_prev = -np.ones_like(x)

    for i in range(1, len(diag)):
        p = (diag[i] - x) * p_prev - e2[i - 1] * p_prev2
        dp = -p_prev + (diag[i] - x) * dp_prev - e2[i - 1] * dp_prev2
        p_prev2, p_prev = p_prev, p
        dp_prev2, dp_prev = dp_prev, dp

        size = np.maximum(np.abs(p_prev), np.abs(dp_prev))
        out_of_range = (size > cfg.sturm_rescale_high) | ((size < cfg.sturm_rescale_low) & (size > 0))
        if np.any(out_of_range):
            scale = np.where(out_of_range, 1.0 / np.where(size > 0, size, 1.0), 1.0)
            p_prev, p_prev2 = p_prev * scale, p_prev2 * scale
            dp_prev, dp_prev2 = dp_prev * scale, dp_prev2 * scale

    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(dp_prev != 0, p_prev / dp_prev, 0.0)


def bisect_eigenvalues(
    diag: NDArray[np.float64],
    offdiag: NDArray[np.float64],
    cfg: Settings = default_settings,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Brackets [lo, hi] around eigenvalue k for every k, found simultaneously."""
    size = len(diag)
    low, high = gershgorin_bounds(diag, offdiag)
    pad = 1e-8 * max(1.0, abs(low), abs(high))
    lo = np.full(size, low - pad)
    hi = np.full(size, high + pad)
    index = np.arange(size)

    for iteration in range(cfg.bisection_max_iter):
        mid = 0.5 * (lo + hi)
        below = sturm_count(diag, offdiag, mid) > index
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
        if np.all(hi - lo <= cfg.sturm_abs_tol * np.maximum(1.0, np.abs(mid))):
            logger.debug(f"bisection converged after {iteration + 1} sweeps for dimension {size}")
            break
    else:
        logger.warning(f"bisection hit {cfg.bisection_max_iter} sweeps for dimension {size}")
    return lo, hi


def eigenvalues(
    diag: NDArray[np.float64] | tuple[float, ...],
    offdiag: NDArray[np.float64] | tuple[float, ...],
    cfg: Settings = default_settings,
) -> NDArray[np.float64]:
    """All eigenvalues, ascending."""
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    lo, hi = bisect_eigenvalues(diag, offdiag, cfg)
    x = 0.5 * (lo + hi)

    for _ in range(cfg.newton_steps):
        candidate = x - characteristic_ratio(diag, offdiag, x, cfg)
        inside = (candidate >= lo) & (candidate <= hi) & np.isfinite(candidate)
        x = np.where(inside, candidate, x)

    return np.sort(x)

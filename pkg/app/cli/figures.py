# app/cli/figures.py
"""
SVG figures. Presentation only: CSV/JSON from the commands is the canonical output.

Each numbered preset registers itself in FIGURE_REGISTRY and returns the
files it wrote.
"""
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from app.classical.actions import ebk_comparison  # noqa: E402
from app.classical.critical import IsolatedValue, isolated_critical_value, sample_critical_set  # noqa: E402
from app.classical.geometry import collision_orbit, sample_ellipse_family  # noqa: E402
from app.classical.reduction import PhaseSpaceSlice, phase_space_slice  # noqa: E402
from app.core.config import Settings, settings as default_settings  # noqa: E402
from app.core.errors import NumericalError, PreconditionError  # noqa: E402
from app.core.models import JointSpectrum, SystemParams  # noqa: E402
from app.core.quantum_numbers import energy_from_n  # noqa: E402
from app.monodromy.lattice import build_lattice  # noqa: E402
from app.monodromy.transport import MonodromyReport, detect  # noqa: E402
from app.spectrum.interbasis import joint_spectrum  # noqa: E402

logger = logging.getLogger(__name__)

# fixed salt and no date: same inputs give the same SVG bytes
plt.rcParams["svg.hashsalt"] = "hydromono"
plt.rcParams["font.size"] = 9

FIGURE_REGISTRY = {}

PRESET_N = 12
PRESET_A = 144.0 / 5.0
SWEEP_A = (4.0, 36.0, 288.0)
EBK_N = (6, 21, 41)


def register_figure(number: int):
    def decorator(fn):
        FIGURE_REGISTRY[number] = fn
        return fn
    return decorator


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)
    logger.info(f"figure written: {path}")
    return path


# ── Building blocks ───────────────────────────────────────────────────────────

def _scatter_spectrum(ax, spectrum: JointSpectrum, isolated: IsolatedValue | None) -> None:
    frame = spectrum.to_frame()
    ax.scatter(frame["m"], frame["g"], s=6, c="black", zorder=2)
    if isolated is not None:
        ax.plot(isolated.l_z, isolated.g, "o", color="red", ms=5, zorder=3)
    ax.set_xlabel("l_z")
    ax.set_ylabel("g")


def _critical_curves(ax, E: float, params: SystemParams, cfg: Settings) -> None:
    points = sample_critical_set(E, params, cfg)
    for branch in ("eta", "xi"):
        curve = np.array([(p.l_z, p.g) for p in points if p.branch == branch])
        if curve.size == 0:
            continue
        ax.plot(curve[:, 0], curve[:, 1], color="red", lw=1)
        ax.plot(-curve[:, 0], curve[:, 1], color="red", lw=1)


def plot_spectrum(
    spectrum: JointSpectrum,
    path: Path,
    report: MonodromyReport | None = None,
    isolated: IsolatedValue | None = None,
) -> Path:
    """Joint spectrum in (l_z, g), optionally with the transported cells drawn over it."""
    fig, ax = plt.subplots(figsize=(6, 5))
    _scatter_spectrum(ax, spectrum, isolated)

    if report is not None:
        rows = report.path.corners(build_lattice(spectrum))
        for _, cell in pd.DataFrame(rows).groupby("step"):
            by_corner = cell.set_index("corner")
            # anchor in the middle so the segments run u → anchor → v
            order = [c for c in ("u", "anchor", "v") if c in by_corner.index]
            ax.plot(by_corner.loc[order, "m"], by_corner.loc[order, "g"], color="tab:blue", lw=0.6, alpha=0.6)
        anchors = [(r["m"], r["g"]) for r in rows if r["corner"] == "anchor"]
        xs, ys = zip(*anchors)
        ax.plot(xs, ys, color="tab:blue", lw=1.5)
        ax.set_title(f"n={spectrum.n} a={spectrum.params.a:g}  M={list(map(list, report.matrix.entries))}")
    else:
        ax.set_title(f"n={spectrum.n} a={spectrum.params.a:g}")
    return _save(fig, path)


def plot_ellipses(E: float, params: SystemParams, path: Path, count: int = 16) -> Path:
    """Kepler ellipses through the empty focus over the isolated critical value."""
    fig, ax = plt.subplots(figsize=(5, 5))
    for member in sample_ellipse_family(E, params, count):
        outline = member.outline()
        ax.plot(outline[:, 0], outline[:, 1], color="gray", lw=0.7)
    orbit = collision_orbit(E, params)
    ax.plot([0.0, 0.0], [orbit.z_turning, orbit.z_nucleus], color="red", lw=1.5)
    ax.plot([0.0], [params.a], "o", color="black", ms=5)
    ax.plot([0.0], [-params.a], "o", mfc="white", mec="black", ms=5)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("z")
    ax.set_title(f"E={E:.4g} a={params.a:g}")
    return _save(fig, path)


def plot_critical(n: int, a_values: tuple[float, ...], path: Path, cfg: Settings = default_settings) -> Path:
    """One panel per a: exact spectrum, critical curves, isolated value when present."""
    E = energy_from_n(n)
    fig, axes = plt.subplots(1, len(a_values), figsize=(4 * len(a_values), 4), squeeze=False)
    for ax, a in zip(axes[0], a_values):
        params = SystemParams(a=a)
        _critical_curves(ax, E, params, cfg)
        _scatter_spectrum(ax, joint_spectrum(n, params, cfg), isolated_critical_value(n, params, cfg))
        ax.set_title(f"n={n} a={a:g}")
    return _save(fig, path)


def plot_slice(slices: list[tuple[float, PhaseSpaceSlice]], path: Path) -> Path:
    """Section ρ₃ = 0 of the reduced space with the level lines G = g for each a."""
    fig, ax = plt.subplots(figsize=(5, 5))
    section = slices[0][1]
    ax.plot(section.section_rho1, section.section_rho2, color="black", lw=1.2)
    extent = max((abs(v) for v in section.section_rho2), default=1.0) or 1.0
    for a, sl in slices:
        for line in sl.lines:
            ax.plot(line.rho1, line.rho2, lw=1, label=f"a={a:g}")
    ax.set_ylim(-1.5 * extent, 1.5 * extent)
    ax.set_xlabel("ρ1")
    ax.set_ylabel("ρ2")
    ax.legend(loc="upper left")
    ax.set_title(f"n={section.n:g} m={section.m:g}")
    return _save(fig, path)


def plot_ebk(frame: pd.DataFrame, n: int, a: float, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 5))
    ax.scatter(frame["m"], frame["g_exact"], s=8, c="black", label="exact")
    ax.scatter(frame["m"], frame["g_ebk"], s=14, marker="x", c="red", lw=0.7, label="EBK")
    ax.set_xlabel("l_z")
    ax.set_ylabel("g")
    ax.legend(loc="upper left")
    ax.set_title(f"n={n} a={a:g}  max|Δg|={frame['abs_err'].max():.3g}")
    return _save(fig, path)


# ── Presets ───────────────────────────────────────────────────────────────────

@register_figure(1)
def spectrum_with_cells(out_dir: Path, cfg: Settings = default_settings) -> list[Path]:
    params = SystemParams(a=PRESET_A)
    spectrum = joint_spectrum(PRESET_N, params, cfg)
    try:
        report = detect(spectrum, cfg=cfg)
    except NumericalError as exc:
        logger.warning(f"figure 1 drawn without cell trace: {exc}")
        report = None
    isolated = isolated_critical_value(PRESET_N, params, cfg)
    return [plot_spectrum(spectrum, out_dir / f"fig1_spectrum_n{PRESET_N}.svg", report, isolated)]


@register_figure(2)
def ellipse_family(out_dir: Path, cfg: Settings = default_settings) -> list[Path]:
    E = energy_from_n(PRESET_N)
    return [plot_ellipses(E, SystemParams(a=PRESET_A), out_dir / f"fig2_ellipses_n{PRESET_N}.svg")]


@register_figure(3)
def critical_sweep(out_dir: Path, cfg: Settings = default_settings) -> list[Path]:
    return [plot_critical(PRESET_N, SWEEP_A, out_dir / f"fig3_critical_n{PRESET_N}.svg", cfg)]


@register_figure(4)
def reduced_slice(out_dir: Path, cfg: Settings = default_settings) -> list[Path]:
    slices = [(a, phase_space_slice(PRESET_N, 0, SystemParams(a=a), [2.0 * a])) for a in SWEEP_A]
    return [plot_slice(slices, out_dir / f"fig4_reduced_n{PRESET_N}_m0.svg")]


@register_figure(5)
def ebk_sweep(out_dir: Path, cfg: Settings = default_settings) -> list[Path]:
    paths = []
    for n in EBK_N:
        a = n * n / 4.0
        frame = ebk_comparison(n, SystemParams(a=a), cfg)
        paths.append(plot_ebk(frame, n, a, out_dir / f"fig5_ebk_n{n}.svg"))
    return paths


def render_figure(number: int, out_dir: Path, cfg: Settings = default_settings) -> list[Path]:
    if number not in FIGURE_REGISTRY:
        raise PreconditionError(f"Unknown figure: {number}. Available: {sorted(FIGURE_REGISTRY)}")
    return FIGURE_REGISTRY[number](out_dir, cfg)

# app/cli/commands.py
import logging
import math
from pathlib import Path
from typing import Literal

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.classical.actions import ebk_comparison
from app.classical.critical import branch_ranges, isolated_critical_value, sample_critical_set
from app.classical.reduction import classify_singular_point, phase_space_slice
from app.cli import figures
from app.cli.export import read_json, write_csv, write_json
from app.core.config import settings
from app.core.errors import PreconditionError
from app.core.models import JointSpectrum, SystemParams
from app.core.quantum_numbers import energy_from_n
from app.monodromy.lattice import build_lattice
from app.monodromy.transport import Orientation, detect, is_unit_shear
from app.spectrum.interbasis import joint_spectrum, trace_defect

logger = logging.getLogger(__name__)

COMMAND_REGISTRY = {}

OutputFormat = Literal["csv", "json", "svg"]


def register_command(name: str):
    def decorator(fn):
        COMMAND_REGISTRY[name] = fn
        return fn
    return decorator


class RunConfig(BaseModel):
    """Parsed command line. Validated in full before any computation starts."""

    model_config = ConfigDict(frozen=True)

    command: str
    n: int | None = Field(None, ge=1)
    a: tuple[float, ...] = ()
    m: int | None = None
    center: tuple[float, float] | None = None
    loop_width: int | None = Field(None, ge=1)
    orientation: Orientation = "ccw"
    out: Path | None = None
    format: OutputFormat | None = None
    which: tuple[int, ...] = (1, 2, 3, 4, 5)
    input: Path | None = None

    @field_validator("a")
    @classmethod
    def _positive(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        for a in v:
            if not math.isfinite(a) or a <= 0:
                raise ValueError(f"focal half-distance must be finite and > 0, got {a}")
        return v

    @field_validator("which")
    @classmethod
    def _known_figures(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        unknown = [w for w in v if w not in figures.FIGURE_REGISTRY]
        if unknown:
            raise ValueError(f"unknown figures {unknown}; available {sorted(figures.FIGURE_REGISTRY)}")
        return v

    @model_validator(mode="after")
    def _command_inputs(self) -> "RunConfig":
        if self.command not in COMMAND_REGISTRY:
            raise ValueError(f"Unknown command: {self.command}. Available: {list(COMMAND_REGISTRY)}")
        if self.command == "figures":
            return self
        if self.command == "monodromy" and self.input is not None:
            return self
        if self.n is None:
            raise ValueError(f"{self.command} needs --n")
        if not self.a:
            raise ValueError(f"{self.command} needs --a")
        if self.command != "reduced" and len(self.a) != 1:
            raise ValueError(f"{self.command} takes a single --a, got {len(self.a)}")
        if self.m is not None and self.command == "reduced" and abs(self.m) > self.n:
            raise ValueError(f"|m| = {abs(self.m)} exceeds n = {self.n}")
        return self

    @property
    def params(self) -> SystemParams:
        return SystemParams(a=self.a[0])

    @property
    def meta(self) -> dict:
        return {"n": self.n, "a": self.a[0], "E": energy_from_n(self.n)}


def _written(path: Path | None) -> list[Path]:
    return [path] if path is not None else []


def _svg_target(config: RunConfig, stem: str) -> Path:
    return config.out if config.out is not None else Path(f"{stem}.svg")


# ── Commands ──────────────────────────────────────────────────────────────────

@register_command("spectrum")
def cmd_spectrum(config: RunConfig) -> list[Path]:
    """Joint spectrum at (n, a) as rows `m,g`."""
    params = config.params
    spectrum = joint_spectrum(config.n, params, settings)
    fmt = config.format or "csv"

    if fmt == "svg":
        isolated = isolated_critical_value(config.n, params, settings)
        return [figures.plot_spectrum(spectrum, _svg_target(config, f"spectrum_n{config.n}"), isolated=isolated)]
    if fmt == "json":
        defects = {m: trace_defect(spectrum.column(m), config.n, m) for m in spectrum.columns}
        diagnostics = {"size": spectrum.size, "max_trace_defect": max(defects.values())}
        return _written(write_json(config.meta, spectrum.model_dump(mode="json"), diagnostics, config.out))
    return _written(write_csv(spectrum.to_frame(), config.out))


@register_command("critical")
def cmd_critical(config: RunConfig) -> list[Path]:
    """Critical curve samples `s0,l_z,g,branch`, plus the isolated value when it exists."""
    params = config.params
    E = energy_from_n(config.n)
    if config.format == "svg":
        return [figures.plot_critical(config.n, config.a, _svg_target(config, f"critical_n{config.n}"), settings)]

    points = sample_critical_set(E, params, settings)
    rows = [p.model_dump() for p in points]
    isolated = isolated_critical_value(config.n, params, settings)
    if isolated is not None:
        # the double root of P sits at s = 1 over the isolated value
        rows.append({
            "s0": 1.0,
            "l_z": isolated.l_z,
            "g": isolated.g,
            "branch": "degenerate" if isolated.degenerate else "isolated",
        })
    frame = pd.DataFrame(rows, columns=["s0", "l_z", "g", "branch"])

    if config.format == "json":
        diagnostics = {
            "branch_ranges": {k: list(v) for k, v in branch_ranges(E, params).items()},
            "samples": len(points),
        }
        result = {
            "critical_points": frame.to_dict(orient="records"),
            "isolated": isolated.model_dump() if isolated is not None else None,
        }
        return _written(write_json(config.meta, result, diagnostics, config.out))
    return _written(write_csv(frame, config.out))


def _load_spectrum(path: Path) -> JointSpectrum:
    data = read_json(path)
    # report files carry the spectrum under "result"; bare model dumps are accepted too
    payload = data.get("result", data)
    return JointSpectrum.model_validate(payload)


@register_command("monodromy")
def cmd_monodromy(config: RunConfig) -> list[Path]:
    """Transport a cell around the loop and report M, the loop, the trace and the verdict."""
    if config.input is not None:
        spectrum = _load_spectrum(config.input)
        logger.info(f"spectrum read from {config.input}: n={spectrum.n} a={spectrum.params.a:g}")
    else:
        spectrum = joint_spectrum(config.n, config.params, settings)

    report = detect(spectrum, config.center, config.loop_width, config.orientation, settings)
    lattice = build_lattice(spectrum)
    trace = report.path.corners(lattice)
    fmt = config.format or "json"

    if fmt == "svg":
        isolated = isolated_critical_value(spectrum.n, spectrum.params, settings)
        path = _svg_target(config, f"monodromy_n{spectrum.n}")
        return [figures.plot_spectrum(spectrum, path, report, isolated)]
    if fmt == "csv":
        return _written(write_csv(pd.DataFrame(trace, columns=["step", "corner", "m", "g"]), config.out))

    params = {
        "n": spectrum.n,
        "a": spectrum.params.a,
        "E": spectrum.energy,
        "center": list(report.loop.center),
        "loop_width": config.loop_width,
        "orientation": config.orientation,
    }
    result = {
        "matrix": [list(row) for row in report.matrix.entries],
        "verdict": report.verdict,
        "index": report.index,
        "loop": report.loop.model_dump(mode="json"),
        "trace": trace,
    }
    diagnostics = {
        "scaling": lattice.scaling,
        "steps": len(report.path.cells),
        "det": report.matrix.det,
        "trace": report.matrix.trace,
        "unit_shear": is_unit_shear(report.matrix),
    }
    return _written(write_json(params, result, diagnostics, config.out))


@register_command("reduced")
def cmd_reduced(config: RunConfig) -> list[Path]:
    """Section ρ₃ = 0 of the reduced space and the line G = 2a for each --a, as `kind,g,rho1,rho2`."""
    m = config.m if config.m is not None else 0
    slices = [(a, phase_space_slice(config.n, m, SystemParams(a=a), [2.0 * a])) for a in config.a]

    if config.format == "svg":
        return [figures.plot_slice(slices, _svg_target(config, f"reduced_n{config.n}_m{m}"))]

    section = slices[0][1]
    rows = [
        {"kind": "section", "g": math.nan, "rho1": r1, "rho2": r2}
        for r1, r2 in zip(section.section_rho1, section.section_rho2)
    ]
    for _, sl in slices:
        for line in sl.lines:
            rows.extend({"kind": "line", "g": line.g, "rho1": r1, "rho2": r2} for r1, r2 in zip(line.rho1, line.rho2))
    frame = pd.DataFrame(rows, columns=["kind", "g", "rho1", "rho2"])

    if config.format == "json":
        meta = {"n": config.n, "m": m, "a": list(config.a), "E": energy_from_n(config.n)}
        result = {
            "section": {"rho1": section.section_rho1, "rho2": section.section_rho2},
            "lines": [{"a": a, **line.model_dump()} for a, sl in slices for line in sl.lines],
        }
        diagnostics = {
            "singular_point": {str(a): classify_singular_point(config.n, SystemParams(a=a), settings) for a in config.a}
        }
        return _written(write_json(meta, result, diagnostics, config.out))
    return _written(write_csv(frame, config.out))


@register_command("actions")
def cmd_actions(config: RunConfig) -> list[Path]:
    """Exact against EBK values per state, `m,n_eta,g_exact,g_ebk,abs_err`."""
    frame = ebk_comparison(config.n, config.params, settings)

    if config.format == "svg":
        return [figures.plot_ebk(frame, config.n, config.a[0], _svg_target(config, f"actions_n{config.n}"))]
    if config.format == "json":
        diagnostics = {
            "max_abs_err": float(frame["abs_err"].max()),
            "max_normalized_err": float(frame["normalized_err"].max()),
        }
        return _written(write_json(config.meta, frame.to_dict(orient="records"), diagnostics, config.out))
    return _written(write_csv(frame[["m", "n_eta", "g_exact", "g_ebk", "abs_err"]], config.out))


@register_command("figures")
def cmd_figures(config: RunConfig) -> list[Path]:
    if config.format not in (None, "svg"):
        raise PreconditionError(f"figures are written as svg only, got --format {config.format}")
    out_dir = config.out if config.out is not None else Path("figures")
    paths: list[Path] = []
    for number in config.which:
        paths.extend(figures.render_figure(number, out_dir, settings))
    logger.info(f"{len(paths)} figure files in {out_dir}")
    return paths

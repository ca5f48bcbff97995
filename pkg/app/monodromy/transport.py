# app/monodromy/transport.py
"""
Transport of a fundamental cell around a rectangle in (m, g).

A cell is an anchor point (m, k) with two basis vectors: u to a point in
column m + 1 and v to the next point up the same column. v is the same index
vector (0, 1) everywhere; only the column shift of u can change. Each step
moves the anchor to a neighbour. The u-corner of the new cell is found by
predicting the g-offset from the previous cells and snapping to the nearest
level of column m + 1, measured in that column's local spacing. A −u step
instead locates the new anchor and keeps the old anchor as its u-corner.
u-corners past the end of a column are virtual levels.

Back at the starting anchor, the final basis written in the initial one is
the monodromy matrix.
"""
import logging
import math
from collections.abc import Iterator
from typing import Literal

import numpy as np
from matplotlib.path import Path
from pydantic import BaseModel, ConfigDict

from app.core.config import Settings, settings as default_settings
from app.core.errors import InfeasibleLoopError, LatticeSolveError, SnapAmbiguityError
from app.core.models import JointSpectrum
from app.monodromy.lattice import SpectralLattice, build_lattice

logger = logging.getLogger(__name__)

Orientation = Literal["ccw", "cw"]
Move = Literal["+u", "-u", "+v", "-v"]
IndexVector = tuple[int, int]   # (Δm, Δk)

# fractions of cfg.loop_half_height tried in turn when a loop cannot be walked
HEIGHT_LADDER = (1.0, 0.5, 0.25)


class LoopSpec(BaseModel):
    """Rectangle around `center`: columns m_lo..m_hi, bottom edge at or below g_lo, top edge at or above g_hi."""

    model_config = ConfigDict(frozen=True)

    center: tuple[float, float]   # (l_z, g)
    m_lo: int
    m_hi: int
    g_lo: float
    g_hi: float
    orientation: Orientation = "ccw"

    def reversed(self) -> "LoopSpec":
        return self.model_copy(update={"orientation": "cw" if self.orientation == "ccw" else "ccw"})


class Cell(BaseModel):
    model_config = ConfigDict(frozen=True)

    anchor: tuple[int, int]   # (m, k)
    u: IndexVector
    v: IndexVector


class CellPath(BaseModel):
    model_config = ConfigDict(frozen=True)

    loop: LoopSpec
    cells: tuple[Cell, ...]
    closed: bool

    def corners(self, lattice: SpectralLattice) -> list[dict[str, float]]:
        """Anchor, u-corner and v-corner of every visited cell in (m, g); virtual corners are left out."""
        rows = []
        for step, cell in enumerate(self.cells):
            m, k = cell.anchor
            for name, (dm, dk) in (("anchor", (0, 0)), ("u", cell.u), ("v", cell.v)):
                if lattice.exists(m + dm, k + dk):
                    rows.append({"step": step, "corner": name, "m": m + dm, "g": lattice.value(m + dm, k + dk)})
        return rows


class MonodromyMatrix(BaseModel):
    model_config = ConfigDict(frozen=True)

    entries: tuple[tuple[int, int], tuple[int, int]]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=int)

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.entries
        return a * d - b * c

    @property
    def trace(self) -> int:
        return self.entries[0][0] + self.entries[1][1]

    @property
    def is_identity(self) -> bool:
        return self.entries == ((1, 0), (0, 1))

    def inverse(self) -> "MonodromyMatrix":
        (a, b), (c, d) = self.entries
        det = self.det
        return MonodromyMatrix(entries=((d * det, -b * det), (-c * det, a * det)))

    def __matmul__(self, other: "MonodromyMatrix") -> "MonodromyMatrix":
        product = self.array @ other.array
        return MonodromyMatrix(entries=tuple(tuple(int(x) for x in row) for row in product))


class MonodromyReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    matrix: MonodromyMatrix
    loop: LoopSpec
    path: CellPath
    index: int
    verdict: Literal["defect", "no-defect"]


def monodromy_index(M: MonodromyMatrix) -> int:
    """gcd of the entries of M − I; 1 exactly when M is conjugate to [[1, 1], [0, 1]] (for trace 2, det 1)."""
    (a, b), (c, d) = M.entries
    return math.gcd(a - 1, b, c, d - 1)


def is_unit_shear(M: MonodromyMatrix) -> bool:
    return M.det == 1 and M.trace == 2 and monodromy_index(M) == 1


# ── Loop geometry ─────────────────────────────────────────────────────────────

def _column_fits(lattice: SpectralLattice, m: int, g_lo: float, g_hi: float) -> bool:
    if abs(m) > lattice.n - 3:
        return False
    ys = lattice.column(m)
    return bool(ys[0] <= g_lo and ys[-1] >= g_hi)


def candidate_loops(
    lattice: SpectralLattice,
    center: tuple[float, float],
    width: int | None = None,
    orientation: Orientation = "ccw",
    cfg: Settings = default_settings,
) -> Iterator[LoopSpec]:
    """
    Rectangles around center = (l_z, g) that fit the lattice, widest first.

    The edge heights are g ∓ h·δ with δ the local spacing of the center column
    and h running down HEIGHT_LADDER · cfg.loop_half_height. `width` fixes the
    column half-width.
    """
    l_c, g_c = center
    m_c = round(l_c)
    if m_c not in lattice.columns:
        raise InfeasibleLoopError(f"center l_z = {l_c} is outside the lattice")
    ys = lattice.column(m_c)
    if not ys[0] < g_c < ys[-1]:
        raise InfeasibleLoopError(
            f"center g = {g_c:.6g} lies outside column m={m_c} (g from {ys[0]:.6g} to {ys[-1]:.6g}); "
            f"choose an interior center"
        )

    delta = lattice.local_spacing(m_c, g_c)
    widths = [width] if width is not None else range(lattice.n, 0, -1)
    for factor in HEIGHT_LADDER:
        h = factor * cfg.loop_half_height * delta
        g_lo, g_hi = g_c - h, g_c + h
        for w in widths:
            m_lo, m_hi = m_c - w, m_c + w
            if w < 1 or not m_lo < l_c < m_hi:
                continue
            if all(_column_fits(lattice, m, g_lo, g_hi) for m in range(m_lo, m_hi + 1)):
                yield LoopSpec(center=(l_c, g_c), m_lo=m_lo, m_hi=m_hi, g_lo=g_lo, g_hi=g_hi, orientation=orientation)


def default_loop(
    lattice: SpectralLattice,
    center: tuple[float, float],
    width: int | None = None,
    orientation: Orientation = "ccw",
    cfg: Settings = default_settings,
) -> LoopSpec:
    """Widest feasible rectangle around center = (l_z, g); `width` fixes the column half-width instead."""
    loop = next(candidate_loops(lattice, center, width, orientation, cfg), None)
    if loop is None:
        raise InfeasibleLoopError(
            f"no feasible loop around ({center[0]}, {center[1]:.6g}) at n={lattice.n}: columns must keep "
            f"|m| <= {lattice.n - 3} and reach past both edges of the rectangle"
        )
    logger.info(f"loop around {loop.center}: columns {loop.m_lo}..{loop.m_hi}, g {loop.g_lo:.6g}..{loop.g_hi:.6g}")
    return loop


# ── Transport ─────────────────────────────────────────────────────────────────

class _Walker:
    """Mutable cell state while walking the loop."""

    def __init__(self, lattice: SpectralLattice, m: int, k: int, cfg: Settings) -> None:
        self.lattice = lattice
        self.ambiguity = cfg.snap_ambiguity
        self.max_steps = 10 * lattice.n * lattice.n
        self.m, self.k = m, k
        # any point of the next column spans the lattice together with v
        self.u_k = lattice.nearest(m + 1, self.g)
        self.restart()

    def restart(self) -> None:
        """Make the current cell the first one of the path."""
        self.U = self.u_corner - self.g
        self.U_prev: float | None = None
        self.last_move: Move | None = None
        self.cells = [self.cell()]

    @property
    def g(self) -> float:
        return self.lattice.value(self.m, self.k)

    @property
    def u_corner(self) -> float:
        return self.lattice.value(self.m + 1, self.u_k)

    def cell(self) -> Cell:
        return Cell(anchor=(self.m, self.k), u=(1, self.u_k - self.k), v=(0, 1))

    def _predicted(self, move: Move) -> float:
        # first order along a straight run, zero order after a turn
        if move == self.last_move and self.U_prev is not None:
            return 2.0 * self.U - self.U_prev
        return self.U

    def landing(self) -> float:
        """g of the point a −u step would land on."""
        k = self.lattice.snap(self.m - 1, self.g - self._predicted("-u"), self.ambiguity)
        return self.lattice.value(self.m - 1, k)

    def below(self) -> float | None:
        return self.lattice.value(self.m, self.k - 1) if self.k > 0 else None

    def above(self) -> float | None:
        return self.lattice.value(self.m, self.k + 1) if self.lattice.exists(self.m, self.k + 1) else None

    def step(self, move: Move) -> None:
        if len(self.cells) > self.max_steps:
            raise InfeasibleLoopError(f"transport did not close after {self.max_steps} steps")
        lattice = self.lattice
        U_pred = self._predicted(move)

        if move == "+u":
            if not lattice.exists(self.m + 1, self.u_k):
                raise InfeasibleLoopError(f"u-corner k={self.u_k} of (m={self.m}, k={self.k}) is off the lattice")
            self.m, self.k = self.m + 1, self.u_k
            self.u_k = lattice.snap(self.m + 1, self.g + U_pred, self.ambiguity)
        elif move == "-u":
            k = lattice.snap(self.m - 1, self.g - U_pred, self.ambiguity)
            if not lattice.exists(self.m - 1, k):
                raise InfeasibleLoopError(f"−u step from (m={self.m}, k={self.k}) leaves column m={self.m - 1}")
            self.m, self.k, self.u_k = self.m - 1, k, self.k
        else:
            k = self.k + (1 if move == "+v" else -1)
            if not lattice.exists(self.m, k):
                raise InfeasibleLoopError(f"level k={k} is outside column m={self.m}")
            self.k = k
            self.u_k = lattice.snap(self.m + 1, self.g + U_pred, self.ambiguity)

        self.U_prev, self.U = self.U, self.u_corner - self.g
        self.last_move = move
        self.cells.append(self.cell())
        logger.debug(f"{move}: anchor ({self.m}, {self.k}) u→k={self.u_k}")


def _settle(walker: _Walker, loop: LoopSpec, low: bool) -> None:
    """Bring the anchor to the edge: highest point at or below g_lo, or lowest at or above g_hi."""
    if low:
        while walker.g > loop.g_lo:
            walker.step("-v")
        while (up := walker.above()) is not None and up <= loop.g_lo:
            walker.step("+v")
    else:
        while walker.g < loop.g_hi:
            walker.step("+v")
        while (down := walker.below()) is not None and down >= loop.g_hi:
            walker.step("-v")


def _clear(walker: _Walker, loop: LoopSpec, move: Move, low: bool) -> None:
    """Move along v until the point `move` lands on is on the anchor's side of the center."""
    g_c = loop.center[1]

    def target() -> float:
        return walker.u_corner if move == "+u" else walker.landing()

    if low:
        while target() >= g_c:
            walker.step("-v")
    else:
        while target() <= g_c:
            walker.step("+v")


def _edge(walker: _Walker, loop: LoopSpec, move: Move, low: bool) -> None:
    """Walk along the bottom (low) or top edge until the end column."""
    done = (lambda: walker.m >= loop.m_hi) if move == "+u" else (lambda: walker.m <= loop.m_lo)
    while not done():
        _clear(walker, loop, move, low)
        walker.step(move)
        _settle(walker, loop, low)


def transport(lattice: SpectralLattice, loop: LoopSpec, cfg: Settings = default_settings) -> CellPath:
    """
    Walk the cell once around `loop`, starting and ending at the bottom of column m_lo.

    Bottom-edge anchors stay at or below g_lo and every point the path crosses
    into stays below the center; the top edge mirrors this. The path therefore
    encloses the center whenever m_lo < l_z < m_hi.
    """
    ys = lattice.column(loop.m_lo)
    below = np.flatnonzero(ys <= loop.g_lo)
    if below.size == 0:
        raise InfeasibleLoopError(f"column m={loop.m_lo} has no point below g = {loop.g_lo:.6g}")
    walker = _Walker(lattice, loop.m_lo, int(below[-1]), cfg)
    _clear(walker, loop, "+u", low=True)
    walker.restart()
    k0 = walker.k

    if loop.orientation == "ccw":
        _edge(walker, loop, "+u", low=True)
        _settle(walker, loop, low=False)
        _edge(walker, loop, "-u", low=False)
    else:
        _settle(walker, loop, low=False)
        _edge(walker, loop, "+u", low=False)
        _settle(walker, loop, low=True)
        _edge(walker, loop, "-u", low=True)
    while walker.k != k0:
        walker.step("-v" if walker.k > k0 else "+v")

    path = CellPath(loop=loop, cells=tuple(walker.cells), closed=True)
    polygon = Path([(c.anchor[0], lattice.value(*c.anchor)) for c in path.cells], closed=False)
    if not polygon.contains_point(loop.center):
        raise InfeasibleLoopError(f"transport path does not enclose the center {loop.center}")
    logger.debug(f"transport around {loop.center}: {len(path.cells)} cells")
    return path


def solve_monodromy(path: CellPath) -> MonodromyMatrix:
    """M with [u' v'] = [u v] M, from the index vectors of the first and last cell."""
    first, last = path.cells[0], path.cells[-1]
    if first.anchor != last.anchor:
        raise LatticeSolveError(f"path is not closed: {first.anchor} → {last.anchor}")
    B = np.array([first.u, first.v], dtype=float).T
    B_final = np.array([last.u, last.v], dtype=float).T
    M = np.linalg.solve(B, B_final)
    rounded = np.rint(M)
    if np.max(np.abs(M - rounded)) > 1e-6:
        raise LatticeSolveError(f"non-integer monodromy matrix {M.tolist()}")
    return MonodromyMatrix(entries=tuple(tuple(int(x) for x in row) for row in rounded))


def transport_cell(lattice: SpectralLattice, loop: LoopSpec, cfg: Settings = default_settings) -> MonodromyMatrix:
    return solve_monodromy(transport(lattice, loop, cfg))


def detect(
    spectrum: JointSpectrum,
    center: tuple[float, float] | None = None,
    width: int | None = None,
    orientation: Orientation = "ccw",
    cfg: Settings = default_settings,
) -> MonodromyReport:
    """
    Transport around `center`, by default the value (0, 2a).

    Candidate loops are tried widest first; a loop the cell cannot walk is
    logged and the next one is tried. The first failure is raised when none
    closes.
    """
    lattice = build_lattice(spectrum)
    center = center if center is not None else (0.0, spectrum.params.isolated_g)
    failures: list[Exception] = []
    for loop in candidate_loops(lattice, center, width, orientation, cfg):
        try:
            path = transport(lattice, loop, cfg)
        except (InfeasibleLoopError, SnapAmbiguityError) as exc:
            logger.info(f"loop {loop.m_lo}..{loop.m_hi} × {loop.g_lo:.6g}..{loop.g_hi:.6g} skipped: {exc}")
            failures.append(exc)
            continue
        M = solve_monodromy(path)
        verdict: Literal["defect", "no-defect"] = "no-defect" if M.is_identity else "defect"
        logger.info(f"monodromy n={spectrum.n} a={spectrum.params.a:g} around {center}: {M.entries} ({verdict})")
        return MonodromyReport(matrix=M, loop=loop, path=path, index=monodromy_index(M), verdict=verdict)

    if failures:
        raise failures[0]
    raise InfeasibleLoopError(
        f"no feasible loop around ({center[0]}, {center[1]:.6g}) at n={spectrum.n}: columns must keep "
        f"|m| <= {spectrum.n - 3} and reach past both edges of the rectangle"
    )

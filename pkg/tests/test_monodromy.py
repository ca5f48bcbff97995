# tests/test_monodromy.py
import pytest

from app.classical.reduction import classify_singular_point
from app.core.config import Settings
from app.core.errors import InfeasibleLoopError, PreconditionError, SnapAmbiguityError
from app.core.models import SystemParams
from app.monodromy.lattice import SpectralLattice, build_lattice
from app.monodromy.transport import (
    MonodromyMatrix,
    default_loop,
    detect,
    is_unit_shear,
    monodromy_index,
    solve_monodromy,
    transport,
    transport_cell,
)
from app.spectrum.interbasis import joint_spectrum


@pytest.fixture
def fig1_spectrum(fig1_params):
    return joint_spectrum(12, fig1_params)


def _matrix(a, b, c, d) -> MonodromyMatrix:
    return MonodromyMatrix(entries=((a, b), (c, d)))


def _staggered(n: int = 8, levels: int = 12) -> SpectralLattice:
    """Regular lattice g = k + m/2: every anchor sits half-way between two points of the next column."""
    columns = {m: tuple(k + m / 2.0 for k in range(levels)) for m in range(-(n - 1), n)}
    return SpectralLattice(n=n, columns=columns, scaling=1.0)


# ── Lattice ───────────────────────────────────────────────────────────────────

def test_lattice_from_fig1_spectrum(fig1_spectrum):
    lattice = build_lattice(fig1_spectrum)
    assert lattice.size == 144
    assert len(lattice.columns) == 23
    assert lattice.scaling > 0


def test_smallest_lattice():
    lattice = build_lattice(joint_spectrum(4, SystemParams(a=2.0)))
    assert lattice.size == 16
    assert len(lattice.columns) == 7


def test_lattice_needs_n_at_least_4():
    with pytest.raises(PreconditionError):
        build_lattice(joint_spectrum(3, SystemParams(a=2.0)))


def test_equidistant_snap_is_ambiguous():
    lattice = SpectralLattice(n=4, columns={0: (0.0, 1.0)}, scaling=1.0)
    with pytest.raises(SnapAmbiguityError):
        lattice.snap(0, 0.5, 0.1)


def test_snap_uses_local_spacing():
    lattice = SpectralLattice(n=4, columns={0: (0.0, 1.0, 11.0)}, scaling=1.0)
    # 5.4 is nearer to 1.0 in g, but below the middle of the wide gap
    assert lattice.snap(0, 5.4, 0.1) == 1
    assert lattice.snap(0, 6.8, 0.1) == 2
    assert lattice.local_spacing(0, 6.0) == pytest.approx(5.5)


def test_virtual_levels_continue_the_end_gaps():
    lattice = SpectralLattice(n=4, columns={0: (0.0, 1.0, 3.0)}, scaling=1.0)
    assert lattice.value(0, 4) == pytest.approx(7.0)
    assert lattice.value(0, -2) == pytest.approx(-2.0)
    assert lattice.snap(0, 5.1, 0.1) == 3
    assert not lattice.exists(0, 3)


def test_nearest_breaks_ties_upward():
    lattice = SpectralLattice(n=4, columns={0: (0.0, 1.0)}, scaling=1.0)
    assert lattice.nearest(0, 0.5) == 1
    assert lattice.nearest(0, 9.0) == 1


def test_level_outside_column_is_infeasible():
    lattice = SpectralLattice(n=4, columns={0: (0.0, 1.0)}, scaling=1.0)
    with pytest.raises(InfeasibleLoopError):
        lattice.y(0, 2)
    with pytest.raises(InfeasibleLoopError):
        lattice.y(0, -1)


# ── Matrices ──────────────────────────────────────────────────────────────────

def test_matrix_algebra():
    M = _matrix(1, 1, 0, 1)
    assert M.det == 1
    assert M.trace == 2
    assert M.inverse().entries == ((1, -1), (0, 1))
    assert (M @ M.inverse()).is_identity


@pytest.mark.parametrize(
    "entries, index, shear",
    [
        ((1, 1, 0, 1), 1, True),
        ((1, 0, -1, 1), 1, True),
        ((1, 2, 0, 1), 2, False),
        ((1, 0, 0, 1), 0, False),
    ],
)
def test_index_and_unit_shear(entries, index, shear):
    M = _matrix(*entries)
    assert monodromy_index(M) == index
    assert is_unit_shear(M) is shear


# ── Transport on a regular lattice ────────────────────────────────────────────

def test_half_level_stagger_is_not_ambiguous():
    lattice = _staggered()
    loop = default_loop(lattice, (0.0, 5.25))
    path = transport(lattice, loop)
    assert path.cells[0].u == (1, 0)
    assert solve_monodromy(path).is_identity


@pytest.mark.parametrize("orientation", ["ccw", "cw"])
def test_regular_lattice_loop_is_trivial(orientation):
    lattice = _staggered()
    loop = default_loop(lattice, (1.0, 4.75), width=1, orientation=orientation)
    assert transport_cell(lattice, loop).is_identity


def test_top_edge_may_use_virtual_corners():
    columns = {m: tuple(k - 0.6 * m for k in range(7)) for m in range(-7, 8)}
    lattice = SpectralLattice(n=8, columns=columns, scaling=1.0)
    # u points one level up, so on the last level of column m it leaves column m + 1
    loop = default_loop(lattice, (0.0, 3.5), width=2)
    path = transport(lattice, loop)
    assert solve_monodromy(path).is_identity
    assert any(not lattice.exists(c.anchor[0] + 1, c.anchor[1] + c.u[1]) for c in path.cells)


# ── Detection ─────────────────────────────────────────────────────────────────

def test_defect_around_isolated_value(fig1_spectrum):
    report = detect(fig1_spectrum)
    assert report.verdict == "defect"
    assert report.matrix.det == 1
    assert report.matrix.trace == 2
    assert report.index == 1
    assert is_unit_shear(report.matrix)
    assert report.path.closed
    assert report.path.cells[0].anchor == report.path.cells[-1].anchor


def test_reversed_loop_inverts_the_matrix(fig1_spectrum):
    lattice = build_lattice(fig1_spectrum)
    ccw = detect(fig1_spectrum, orientation="ccw")
    cw_path = transport(lattice, ccw.loop.reversed())
    assert cw_path.cells[0] == ccw.path.cells[0]
    cw = solve_monodromy(cw_path)
    assert cw == ccw.matrix.inverse()
    assert (ccw.matrix @ cw).is_identity


def test_homotopic_loops_give_conjugate_matrices(fig1_spectrum):
    widest = detect(fig1_spectrum)
    width = widest.loop.m_hi - round(widest.loop.center[0])
    if width < 2:
        pytest.skip("only one feasible width at this spectrum")
    narrower = detect(fig1_spectrum, width=width - 1)
    assert narrower.matrix.trace == widest.matrix.trace
    assert narrower.index == widest.index
    assert is_unit_shear(narrower.matrix)


@pytest.mark.parametrize("center", [(0.0, 0.0), (0.0, 400.0)])
def test_no_defect_in_the_regular_region(large_a, center):
    report = detect(joint_spectrum(12, large_a), center=center)
    assert report.verdict == "no-defect"
    assert report.matrix.is_identity


def test_loops_away_from_the_isolated_value_are_trivial(mid_a, rng):
    spectrum = joint_spectrum(12, mid_a)
    checked = 0
    for _ in range(200):
        if checked == 5:
            break
        m_c = int(rng.choice([-4, -3, -2, 2, 3, 4]))
        column = spectrum.column(m_c)
        k = int(rng.integers(1, len(column) - 2))
        middle = 0.5 * (column[k] + column[k + 1])
        try:
            report = detect(spectrum, center=(float(m_c), middle), width=1)
        except InfeasibleLoopError:
            continue
        assert report.matrix.is_identity
        checked += 1
    assert checked == 5


def test_defect_iff_pinched_torus(small_a, mid_a, large_a, fig1_params):
    for params in (small_a, mid_a, fig1_params):
        assert classify_singular_point(12, params) == "pinched_torus"
        report = detect(joint_spectrum(12, params))
        assert report.verdict == "defect"
        assert is_unit_shear(report.matrix)
    assert classify_singular_point(12, large_a) == "elliptic_equilibrium"
    assert detect(joint_spectrum(12, large_a), center=(0.0, 0.0)).verdict == "no-defect"


def test_taller_loops_still_enclose_the_center(mid_a):
    report = detect(joint_spectrum(12, mid_a), cfg=Settings(loop_half_height=1.5))
    assert report.loop.g_lo < 72.0 < report.loop.g_hi
    assert is_unit_shear(report.matrix)


def test_loop_too_large_for_small_n():
    spectrum = joint_spectrum(4, SystemParams(a=1000.0))
    with pytest.raises(InfeasibleLoopError):
        detect(spectrum)


def test_center_outside_column_is_infeasible(fig1_spectrum):
    with pytest.raises(InfeasibleLoopError):
        detect(fig1_spectrum, center=(0.0, 1e4))


def test_transport_encloses_the_center(fig1_spectrum):
    lattice = build_lattice(fig1_spectrum)
    loop = default_loop(lattice, (0.0, 2.0 * fig1_spectrum.params.a))
    path = transport(lattice, loop)
    ms = [cell.anchor[0] for cell in path.cells]
    assert min(ms) == loop.m_lo
    assert max(ms) == loop.m_hi
    column_zero = [lattice.value(*c.anchor) for c in path.cells if c.anchor[0] == 0]
    assert min(column_zero) < loop.center[1] < max(column_zero)

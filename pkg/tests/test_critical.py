# tests/test_critical.py
import numpy as np
import pytest

from app.classical.critical import (
    branch_ranges,
    critical_curve,
    critical_envelope,
    isolated_critical_value,
    sample_critical_set,
)
from app.classical.quartic import separation_quartic
from app.core.errors import PreconditionError
from app.core.models import SystemParams
from app.spectrum.interbasis import joint_spectrum

E12 = -1.0 / 288.0


@pytest.mark.parametrize("s0", [0.0, 1.0, -1.0, -2.0])
def test_curve_rejects_limit_points(s0, mid_a):
    with pytest.raises(PreconditionError):
        critical_curve(E12, mid_a, s0)


def test_curve_rejects_unbound_energy(mid_a):
    with pytest.raises(PreconditionError):
        critical_curve(0.0, mid_a, 0.5)


def test_eta_branch_is_physical(mid_a):
    point = critical_curve(E12, mid_a, -0.5)
    assert point.branch == "eta"
    assert point.l_z > 0


def test_nonphysical_pieces(small_a):
    # positive s0 inside (−1, 1), and the ξ piece below n²/a, have l_z² < 0
    assert critical_curve(E12, small_a, 0.5) is None
    assert critical_curve(E12, small_a, 1.0 + 1e-6) is None


def test_curve_approaches_isolated_value(large_a):
    point = critical_curve(E12, large_a, 1.0 + 1e-6)
    assert point.branch == "xi"
    assert point.l_z < 1e-4
    assert point.g == pytest.approx(2.0 * large_a.a, rel=1e-5)


def test_sampled_points_are_double_roots(fig1_params, cfg):
    points = sample_critical_set(E12, fig1_params, cfg)
    assert {p.branch for p in points} == {"eta", "xi"}
    for point in points[::25]:
        p = separation_quartic(E12, point.g, point.l_z, fig1_params)
        assert p.relative_discriminant() <= 1e-8


def test_branches_start_on_the_g_axis(mid_a, cfg):
    points = sample_critical_set(E12, mid_a, cfg)
    eta = [p for p in points if p.branch == "eta"]
    xi = [p for p in points if p.branch == "xi"]
    assert eta[0].s0 == -1.0
    assert eta[0].l_z == pytest.approx(0.0, abs=1e-12)
    assert eta[0].g == pytest.approx(-72.0)
    # ξ branch starts at s0 = n²/a = 4 where g = n² + a²/n²
    assert xi[0].s0 == pytest.approx(4.0)
    assert xi[0].g == pytest.approx(153.0)
    assert max(p.l_z for p in points) == pytest.approx(12.0, rel=1e-9)


def test_branch_ranges(large_a):
    ranges = branch_ranges(E12, large_a)
    assert ranges["eta"][0] == -1.0
    assert -1.0 < ranges["eta"][1] < 0.0
    assert ranges["xi"][0] == 1.0
    assert ranges["xi"][1] > 1.0


# ── Isolated value ────────────────────────────────────────────────────────────

def test_isolated_value_present(small_a):
    value = isolated_critical_value(12, small_a)
    assert (value.l_z, value.g, value.degenerate) == (0.0, 8.0, False)


def test_isolated_value_absent(large_a):
    assert isolated_critical_value(12, large_a) is None


def test_isolated_value_degenerate_at_bifurcation():
    assert isolated_critical_value(12, SystemParams(a=144.0)).degenerate


def test_isolated_value_rejects_nonpositive_n(small_a):
    with pytest.raises(PreconditionError):
        isolated_critical_value(0, small_a)


# ── Containment ───────────────────────────────────────────────────────────────

def test_spectrum_inside_critical_region(mid_a, cfg):
    spectrum = joint_spectrum(12, mid_a, cfg)
    frame = spectrum.to_frame()
    lower, upper = critical_envelope(spectrum.energy, mid_a, frame["m"].to_numpy(), cfg)
    g = frame["g"].to_numpy()
    assert np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))
    assert np.all(g > lower) and np.all(g < upper)
    assert np.min(np.abs(np.array(spectrum.column(0)) - 72.0)) > 1e-3

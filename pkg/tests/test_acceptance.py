# tests/test_acceptance.py
"""
End-to-end checks at the published parameter sets (n = 12, a = 144/5 and
the sweep a = 4, 36, 288). Finer-grained versions live in the per-module
test files; the oracle grid and the n = 41 sweep are marked slow.
"""
import numpy as np
import pytest

from app.classical.actions import ebk_comparison, sum_rule_residual
from app.classical.critical import critical_envelope
from app.classical.reduction import (
    casimir_annihilation,
    classify_singular_point,
    g_range,
    jacobi_residual,
    sample_reduced_space,
)
from app.core.models import SystemParams
from app.core.quantum_numbers import energy_from_n
from app.monodromy.transport import detect, is_unit_shear
from app.spectrum.interbasis import joint_spectrum, spherical_limit_column, trace_defect
from app.spectrum.shooting import shooting_spectrum

SWEEP = [4.0, 36.0, 144.0 / 5.0, 288.0]


def test_spherical_limit():
    spectrum = joint_spectrum(12, SystemParams(a=1e-8))
    for m, column in spectrum.columns.items():
        assert column == pytest.approx(spherical_limit_column(12, m), abs=1e-6)


@pytest.mark.parametrize("a", SWEEP)
def test_trace_identity(a):
    spectrum = joint_spectrum(12, SystemParams(a=a))
    assert max(trace_defect(spectrum.column(m), 12, m) for m in spectrum.columns) <= 1e-10


@pytest.mark.slow
def test_oracle_equivalence():
    for a in (0.5, 2.0, 10.0):
        params = SystemParams(a=a)
        for n in range(1, 5):
            exact = joint_spectrum(n, params)
            for m in range(-(n - 1), n):
                assert shooting_spectrum(n, m, params) == pytest.approx(exact.column(m), abs=1e-6)


def test_sum_rule_on_random_regular_values(fig1_params, rng):
    E = energy_from_n(12)
    worst = 0.0
    count = 0
    while count < 100:
        l_z = float(rng.uniform(-11.0, 11.0))
        if abs(l_z) < 0.5:
            continue
        g_lo, g_hi = g_range(12.0, l_z, fig1_params)
        g = g_lo + (g_hi - g_lo) * float(rng.uniform(0.05, 0.95))
        worst = max(worst, sum_rule_residual(E, g, l_z, fig1_params))
        count += 1
    assert worst <= 1e-8


def test_ebk_accuracy_at_n12(fig1_params):
    frame = ebk_comparison(12, fig1_params)
    assert len(frame) == 144
    assert frame["normalized_err"].max() <= 0.5


@pytest.mark.slow
def test_ebk_worst_error_shrinks_from_n6_to_n41():
    worst = {n: ebk_comparison(n, SystemParams(a=n * n / 4.0))["normalized_err"].max() for n in (6, 41)}
    assert worst[41] < worst[6]


def test_monodromy_detection(fig1_params, large_a):
    defect = detect(joint_spectrum(12, fig1_params), center=(0.0, 57.6))
    assert defect.matrix.det == 1
    assert is_unit_shear(defect.matrix)
    regular = detect(joint_spectrum(12, large_a), center=(0.0, 0.0))
    assert regular.matrix.is_identity
    above = detect(joint_spectrum(12, large_a), center=(0.0, 400.0))
    assert above.verdict == "no-defect"


@pytest.mark.parametrize(
    "a, kind",
    [
        (4.0, "pinched_torus"),
        (36.0, "pinched_torus"),
        (143.999, "pinched_torus"),
        (144.0, "degenerate_bifurcation"),
        (144.001, "elliptic_equilibrium"),
        (288.0, "elliptic_equilibrium"),
    ],
)
def test_bifurcation_boundary(a, kind):
    assert classify_singular_point(12, SystemParams(a=a)) == kind


def test_critical_set_contains_the_spectrum(mid_a):
    spectrum = joint_spectrum(12, mid_a)
    frame = spectrum.to_frame()
    lower, upper = critical_envelope(spectrum.energy, mid_a, frame["m"].to_numpy())
    g = frame["g"].to_numpy()
    assert np.all(g > lower) and np.all(g < upper)
    assert 72.0 not in spectrum.column(0)


@pytest.mark.parametrize("n", [*range(1, 13), 21, 41])
def test_degeneracy_count(n):
    assert joint_spectrum(n, SystemParams(a=n * n / 4.0)).size == n * n


@pytest.mark.parametrize("m", [0.0, 5.0])
def test_reduction_identities(m, rng):
    points = sample_reduced_space(12.0, m, 100, rng)
    assert max(jacobi_residual(p) for p in points) <= 1e-8
    assert max(casimir_annihilation(p) for p in points) <= 1e-9

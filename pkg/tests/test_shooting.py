# tests/test_shooting.py
import math

import numpy as np
import pytest

from app.core.errors import PreconditionError
from app.core.models import SystemParams
from app.core.quantum_numbers import column_size, energy_from_n
from app.spectrum.interbasis import joint_spectrum
from app.spectrum.shooting import (
    MAX_ORACLE_N,
    shoot_eta,
    shoot_xi,
    shooting_spectrum,
    solution_profile,
)

UNIT = SystemParams(a=1.0)


def test_ground_state_mismatches_vanish():
    E = energy_from_n(1)
    assert shoot_eta(E, 0.0, 0, UNIT) == pytest.approx(0.0, abs=1e-6)
    assert shoot_xi(E, 0.0, 0, UNIT) == pytest.approx(0.0, abs=1e-6)


def test_n2_column_matches_closed_form():
    values = shooting_spectrum(2, 0, UNIT)
    assert values == pytest.approx((1.0 - math.sqrt(2.0), 1.0 + math.sqrt(2.0)), abs=1e-6)


def test_oracle_is_limited_to_small_n():
    with pytest.raises(PreconditionError):
        shooting_spectrum(MAX_ORACLE_N + 1, 0, UNIT)


def test_solution_profile_satisfies_the_equation():
    profile = solution_profile(energy_from_n(1), 0.0, 0, UNIT, side="eta", points=101)
    assert len(profile.s) == len(profile.psi) == 101
    assert profile.normalization == "frobenius"
    assert profile.residual <= 1e-8


def test_ground_state_profile_has_no_node():
    profile = solution_profile(energy_from_n(1), 0.0, 0, UNIT, side="xi")
    psi = np.asarray(profile.psi)
    assert np.all(psi > 0)


@pytest.mark.slow
@pytest.mark.parametrize("a", [0.5, 2.0, 10.0])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_matrix_eigenvalues_agree_with_shooting(n, a):
    params = SystemParams(a=a)
    exact = joint_spectrum(n, params)
    for m in range(n):
        shot = shooting_spectrum(n, m, params)
        assert len(shot) == column_size(n, m)
        assert shot == pytest.approx(exact.column(m), abs=1e-6)

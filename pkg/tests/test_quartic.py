# tests/test_quartic.py
import math

import numpy as np
import pytest

from app.classical.critical import critical_curve
from app.classical.quartic import momentum, real_roots, separation_quartic, turning_points
from app.core.errors import PreconditionError
from app.core.models import SystemParams

E12 = -1.0 / 288.0


def test_coefficient_and_factored_forms_agree(fig1_params, rng):
    p = separation_quartic(E12, 10.0, 3.0, fig1_params)
    s = rng.uniform(-3.0, 12.0, 5)
    np.testing.assert_allclose(p(s), p.factored(s), rtol=1e-12, atol=1e-9)


def test_value_at_axis_is_minus_lz_squared(fig1_params):
    p = separation_quartic(E12, 10.0, 3.0, fig1_params)
    assert float(p(1.0)) == pytest.approx(-9.0, abs=1e-10)
    assert float(p(-1.0)) == pytest.approx(-9.0, abs=1e-10)


def test_hand_expansion():
    p = separation_quartic(-0.5, 0.0, 0.0, SystemParams(a=1.0))
    assert p.coefficients == (-1.0, 2.0, 2.0, -2.0, -1.0)


@pytest.mark.parametrize("E", [0.0, 0.1])
def test_rejects_unbound_energy(E, fig1_params):
    with pytest.raises(PreconditionError):
        separation_quartic(E, 1.0, 0.0, fig1_params)


# ── Turning points ────────────────────────────────────────────────────────────

def test_regular_value_intervals(fig1_params, cfg):
    # l_z = 0, g = 0: Q(s) = −5.76(s² − 1) + 57.6 s has roots 5 ± √26
    tp = turning_points(separation_quartic(E12, 0.0, 0.0, fig1_params), cfg)
    assert tp.eta_interval == pytest.approx((-1.0, 5.0 - math.sqrt(26.0)), abs=1e-10)
    assert tp.xi_interval == pytest.approx((1.0, 5.0 + math.sqrt(26.0)), abs=1e-10)
    assert "axis_contact" in tp.degenerate_flags
    assert not tp.is_degenerate


def test_regular_value_simple_outer_root(fig1_params, cfg):
    p = separation_quartic(E12, 20.0, 2.0, fig1_params)
    tp = turning_points(p, cfg)
    assert not tp.is_empty
    lo, hi = tp.eta_interval
    assert -1.0 < lo < hi < 1.0
    assert abs(float(p.derivative(tp.xi_interval[0]))) > 1e-6
    assert abs(float(p.derivative(tp.xi_interval[1]))) > 1e-6
    mid = 0.5 * (lo + hi)
    assert float(p(mid)) > 0


def test_isolated_value_shares_endpoint(fig1_params, cfg):
    tp = turning_points(separation_quartic(E12, 57.6, 0.0, fig1_params), cfg)
    assert tp.eta_interval[1] == 1.0
    assert tp.xi_interval[0] == 1.0
    assert tp.xi_interval[1] == pytest.approx(9.0, rel=1e-10)
    assert "shared_endpoint" in tp.degenerate_flags
    assert tp.is_degenerate


def test_critical_point_has_double_root(mid_a, cfg):
    point = critical_curve(E12, mid_a, -0.5)
    p = separation_quartic(E12, point.g, point.l_z, mid_a)
    assert p.relative_discriminant() <= 1e-8
    roots, double = real_roots(p, cfg)
    assert double
    assert min(abs(r + 0.5) for r in roots) < 1e-6


def test_outside_image_is_empty(fig1_params, cfg):
    tp = turning_points(separation_quartic(E12, 1e4, 0.0, fig1_params), cfg)
    assert tp.is_empty


# ── Momentum ──────────────────────────────────────────────────────────────────

def test_momentum_vanishes_at_turning_point(fig1_params):
    p = separation_quartic(E12, 0.0, 0.0, fig1_params)
    assert momentum(5.0 - math.sqrt(26.0), p) == pytest.approx(0.0, abs=1e-5)
    assert momentum(3.0, p) > 0


def test_momentum_rejects_axis_and_forbidden_region(fig1_params):
    p = separation_quartic(E12, 0.0, 0.0, fig1_params)
    with pytest.raises(PreconditionError):
        momentum(1.0, p)
    with pytest.raises(PreconditionError):
        momentum(0.5, p)

# tests/test_tridiagonal.py
import math

import numpy as np
import pytest

from app.spectrum.tridiagonal import gershgorin_bounds, sturm_count
from app.spectrum.tridiagonal import eigenvalues as tridiagonal_eigenvalues


def _dense(diag, offdiag):
    return np.diag(diag) + np.diag(offdiag, 1) + np.diag(offdiag, -1)


def test_two_by_two_closed_form():
    values = tridiagonal_eigenvalues([0.0, 2.0], [1.0])
    assert values.tolist() == pytest.approx([1 - math.sqrt(2), 1 + math.sqrt(2)], abs=1e-12)


def test_diagonal_matrix():
    assert tridiagonal_eigenvalues([0.0, 2.0, 6.0], [0.0, 0.0]).tolist() == pytest.approx([0.0, 2.0, 6.0], abs=1e-12)


def test_single_entry():
    assert tridiagonal_eigenvalues([5.0], []).tolist() == pytest.approx([5.0], abs=1e-13)


def test_sturm_count_between_eigenvalues():
    counts = sturm_count(np.array([0.0, 2.0, 6.0]), np.array([0.0, 0.0]), np.array([-1.0, 1.0, 3.0, 7.0]))
    assert counts.tolist() == [0, 1, 2, 3]


def test_matches_dense_solver(rng):
    diag = rng.uniform(-10.0, 10.0, 40)
    offdiag = rng.uniform(0.1, 5.0, 39)
    expected = np.linalg.eigvalsh(_dense(diag, offdiag))
    np.testing.assert_allclose(tridiagonal_eigenvalues(diag, offdiag), expected, rtol=1e-10, atol=1e-10)


def test_large_matrix_needs_rescaling():
    # the characteristic polynomial overflows double range without rescaling
    diag = np.linspace(1e3, 1e4, 300)
    offdiag = np.full(299, 50.0)
    expected = np.linalg.eigvalsh(_dense(diag, offdiag))
    np.testing.assert_allclose(tridiagonal_eigenvalues(diag, offdiag), expected, rtol=1e-11)


def test_gershgorin_encloses_spectrum(rng):
    diag = rng.uniform(-3.0, 3.0, 12)
    offdiag = rng.uniform(-1.0, 1.0, 11)
    lo, hi = gershgorin_bounds(diag, offdiag)
    values = tridiagonal_eigenvalues(diag, offdiag)
    assert lo <= values[0] and values[-1] <= hi

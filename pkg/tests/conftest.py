# tests/conftest.py
import numpy as np
import pytest

from app.core.config import Settings
from app.core.models import SystemParams

FIG1_A = 144.0 / 5.0


@pytest.fixture
def fig1_params() -> SystemParams:
    """n = 12, a = 144/5: isolated critical value present, lattice defect expected."""
    return SystemParams(a=FIG1_A)


@pytest.fixture
def small_a() -> SystemParams:
    return SystemParams(a=4.0)


@pytest.fixture
def mid_a() -> SystemParams:
    return SystemParams(a=36.0)


@pytest.fixture
def large_a() -> SystemParams:
    """a = 288 > 12²: no isolated value at n = 12."""
    return SystemParams(a=288.0)


@pytest.fixture
def cfg() -> Settings:
    return Settings()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)

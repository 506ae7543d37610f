# tests/conftest.py
import pytest

from growthlab.closed_form import pin_bgp, pin_one_integral, pin_two_integral
from growthlab.params import CANONICAL_PARAMS, EconomyParams, steady_state

QUAD_TOL = 1e-12


@pytest.fixture(scope="session")
def params():
    return EconomyParams(**CANONICAL_PARAMS)


@pytest.fixture(scope="session")
def steady(params):
    return steady_state(params)


@pytest.fixture(scope="session")
def z0(steady):
    return 0.5 * steady.z_star


@pytest.fixture(scope="session")
def bgp(params):
    return pin_bgp(params, 1.0)


@pytest.fixture(scope="session")
def two(params, z0):
    return pin_two_integral(params, 1.0, z0, tol=QUAD_TOL)


@pytest.fixture(scope="session")
def one(params, z0):
    return pin_one_integral(params, 1.0, z0, tol=QUAD_TOL)

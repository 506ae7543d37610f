"""Testing the quadrature module"""
import numpy as np
import pytest
from scipy.integrate import quad

from growthlab.errors import QuadratureNonConvergence
from utils.quadrature import adaptive_gauss_kronrod, adaptive_simpson, gauss_kronrod_15


def damped(x):
    return np.exp(-0.3 * x) * np.cos(x)


def test_kronrod_exact_on_polynomials():
    value, _ = gauss_kronrod_15(lambda x: x**5 - 2.0 * x**2, 0.0, 1.0)
    assert value == pytest.approx(1.0 / 6.0 - 2.0 / 3.0, rel=1e-14)


@pytest.mark.parametrize("a,b", [(0.0, 1.0), (0.0, 20.0), (2.5, 40.0)])
def test_gauss_kronrod_against_scipy(a, b):
    expected, _ = quad(damped, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)
    result = adaptive_gauss_kronrod(damped, a, b, tol=1e-12)
    assert result.value == pytest.approx(expected, rel=1e-10, abs=1e-14)
    assert result.evaluations >= 15


def test_simpson_agrees_with_gauss_kronrod():
    f = lambda x: np.exp(-0.384545 * x) * (1.0 + 0.5 * np.exp(-0.3 * x))
    gk = adaptive_gauss_kronrod(f, 0.0, 30.0, tol=1e-12)
    simpson = adaptive_simpson(f, 0.0, 30.0, tol=1e-11)
    assert abs(simpson.value - gk.value) <= 1e-10 * abs(gk.value)


def test_reversed_bounds_negate():
    forward = adaptive_gauss_kronrod(damped, 0.0, 5.0)
    backward = adaptive_gauss_kronrod(damped, 5.0, 0.0)
    assert backward.value == -forward.value


def test_empty_interval():
    assert adaptive_gauss_kronrod(damped, 3.0, 3.0).value == 0.0
    assert adaptive_simpson(damped, 3.0, 3.0).value == 0.0


def test_nonconvergence_raises():
    with pytest.raises(QuadratureNonConvergence) as err:
        adaptive_gauss_kronrod(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, tol=1e-14, max_depth=2)
    assert err.value.exit_code == 3

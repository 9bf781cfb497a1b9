import math

import numpy as np
import pytest
from scipy import integrate as si

from thermalcp.errors import QuadratureError
from thermalcp.quadrature import integrate


def test_kronrod_rule_integrates_polynomials_exactly():
    for deg in range(0, 23):
        val, _ = integrate(lambda x, d=deg: (x**d)[None, :], [0.0, 1.0])
        assert val[0] == pytest.approx(1.0 / (deg + 1), rel=1e-13)


def test_oscillatory_integrand_matches_closed_form():
    a = 40.0
    f = lambda x: np.cos(a * x) * np.exp(-x)
    F = lambda x: math.exp(-x) * (a * math.sin(a * x) - math.cos(a * x)) / (1 + a * a)
    ref = F(10.0) - F(0.0)
    val, err = integrate(lambda x: f(x)[None, :], [0.0, 10.0], epsrel=1e-9)
    assert val[0] == pytest.approx(ref, rel=1e-9)
    assert err < 1e-8 * abs(ref)


def test_smooth_integrand_matches_scipy():
    f = lambda x: 1.0 / (1.0 + x * x) ** 1.5
    ref, _ = si.quad(f, 0, 20, epsabs=0, epsrel=1e-13)
    val, _ = integrate(lambda x: f(x)[None, :], [0.0, 20.0], epsrel=1e-12)
    assert val[0] == pytest.approx(ref, rel=1e-11)


def test_vector_and_complex_integrands():
    val, _ = integrate(lambda x: np.vstack([np.exp(1j * x), x * x]), [0.0, math.pi])
    assert val[0] == pytest.approx(2j, abs=1e-13)
    assert val[1] == pytest.approx(math.pi**3 / 3, rel=1e-13)


def test_endpoint_singularity_is_integrable():
    val, _ = integrate(lambda x: (1 / np.sqrt(x))[None, :], [0.0, 1.0], epsrel=1e-9)
    assert val[0] == pytest.approx(2.0, rel=1e-8)


def test_failure_raises_with_estimate():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda x: np.sin(1e4 * x)[None, :] * np.exp(x), [0.0, 50.0], epsrel=1e-14, limit=5)
    assert info.value.estimate is not None

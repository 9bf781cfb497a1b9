import math

import numpy as np
import pytest

from thermalcp import constants as const
from thermalcp.errors import ConvergenceError
from thermalcp.summation import frequency_sum, matsubara_sum, zero_temperature_integral
from thermalcp.thermal import matsubara_frequency


def test_geometric_series_closed_form():
    T, b = 300.0, 1e-14
    q = math.exp(-b * matsubara_frequency(1, T))
    value, n = matsubara_sum(lambda xi: np.exp(-b * xi), T, tol=1e-14)
    expected = const.k_B * T * (0.5 + q / (1 - q))
    assert value[0] == pytest.approx(expected, rel=1e-13)
    assert n > 3


def test_three_confirmations_before_stopping():
    # one genuinely tiny term followed by large ones must not stop the sum
    def term(xi):
        N = np.rint(xi / matsubara_frequency(1, 300.0)).astype(int)
        return np.where(N == 2, 0.0, np.exp(-0.5 * N))
    value, n = matsubara_sum(term, 300.0, tol=1e-10)
    assert n > 40


def test_zero_term_stops_immediately():
    value, n = matsubara_sum(lambda xi: np.zeros_like(xi), 300.0)
    assert value[0] == 0.0 and n == 3


def test_convergence_error_carries_partial_sum():
    with pytest.raises(ConvergenceError) as info:
        matsubara_sum(lambda xi: 1.0 / (1.0 + xi / 1e14), 300.0, n_max=50)
    assert info.value.partial is not None
    assert info.value.n_terms == 50


def test_zero_temperature_integral_closed_form():
    z = 1e-6
    b = 2 * z / const.c
    value, err = zero_temperature_integral(lambda xi: np.exp(-b * xi), z, tol=1e-12)
    assert value[0] == pytest.approx(const.hbar / (2 * math.pi * b), rel=1e-10)


def test_sum_approaches_integral_at_low_temperature():
    z = 1e-6
    b = 2 * z / const.c
    f = lambda xi: np.exp(-b * xi) / (1 + (xi / 1e15) ** 2)
    low, _ = frequency_sum(f, 1.0, z, tol=1e-12)
    zero, _ = frequency_sum(f, 0.0, z, tol=1e-12)
    assert low[0] == pytest.approx(zero[0], rel=1e-6)


def test_result_independent_of_block_layout():
    f = lambda xi: np.vstack([np.exp(-xi / 1e15), np.exp(-xi / 3e14)])
    a, _ = matsubara_sum(f, 300.0)
    b, _ = matsubara_sum(lambda xi: np.vstack([f(np.array([x]))[:, 0] for x in xi]).T, 300.0)
    np.testing.assert_array_equal(a, b)

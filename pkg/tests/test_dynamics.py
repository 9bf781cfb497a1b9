import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thermalcp import constants as const
from thermalcp.atom import DressedLevels, LevelSystem, rates, thermal_state
from thermalcp.dynamics import InternalState, evolve, rate_matrix, steady_state
from thermalcp.errors import DomainError, MultipleSteadyStatesError, RateModelError
from thermalcp.greens import PlanarGeometry
from thermalcp.thermal import photon_number

from conftest import GOLD, random_three_level


def two_level_dressed(n=2.0, gamma=1e3):
    ls = LevelSystem.two_level(1e13, 1e-30)
    G = np.array([[0.0, gamma * n], [gamma * (n + 1), 0.0]])
    return ls, DressedLevels(ls.energies, np.zeros(2), G)


def detailed_balance_rates(rng, T=300.0):
    """Random rates obeying detailed balance for random level energies."""
    E = np.sort(rng.uniform(0, 5 * const.k_B * T, 3))
    G = np.zeros((3, 3))
    for n in range(3):
        for k in range(n):
            down = rng.uniform(0.1, 10.0) * 10 ** rng.uniform(0, 4)
            G[n, k] = down
            G[k, n] = down * math.exp(-(E[n] - E[k]) / (const.k_B * T))
    return E, G


def rk4(A, p0, t, dt):
    p = p0.copy()
    steps = int(round(t / dt))
    h = t / steps
    for _ in range(steps):
        k1 = A @ p
        k2 = A @ (p + 0.5 * h * k1)
        k3 = A @ (p + 0.5 * h * k2)
        k4 = A @ (p + h * k3)
        p = p + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return p


def test_state_validation():
    with pytest.raises(DomainError):
        InternalState(0.0, [0.6, 0.6])
    with pytest.raises(DomainError):
        InternalState(0.0, [1.2, -0.2])
    with pytest.raises(DomainError):
        InternalState(0.0, [1.0, 0.0], offdiag=np.zeros((3, 3)))


def test_zero_rates_keep_populations():
    ls = LevelSystem.two_level(1e13, 1e-30)
    d = DressedLevels.bare(ls)
    out = evolve(InternalState(0.0, [0.3, 0.7]), d, [0.0, 1.0, 1e9])
    for s in out:
        np.testing.assert_array_equal(s.populations, [0.3, 0.7])


def test_two_level_closed_form():
    n, gamma = 2.0, 1e3
    _, d = two_level_dressed(n, gamma)
    t = np.linspace(0, 5e-3, 11)
    out = evolve(InternalState.pure(2, 0), d, t)
    total = gamma * (2 * n + 1)
    expected = n / (2 * n + 1) * (1 - np.exp(-total * t))
    np.testing.assert_allclose([s.populations[1] for s in out], expected, rtol=1e-12, atol=1e-15)


def test_two_level_matches_fine_step_integration():
    _, d = two_level_dressed()
    A = rate_matrix(d.rates)
    t = 1e-3
    ref = rk4(A, np.array([1.0, 0.0]), t, 1e-3 / np.max(d.rates))
    got = evolve(InternalState.pure(2, 0), d, [t])[0].populations
    np.testing.assert_allclose(got, ref, atol=1e-10)


def test_two_level_monotone_relaxation():
    n, gamma = 5.0, 1.0
    _, d = two_level_dressed(n, gamma)
    out = evolve(InternalState.pure(2, 0), d, np.linspace(0, 3, 200))
    inf = n / (2 * n + 1)
    gap = np.array([abs(s.populations[1] - inf) for s in out])
    assert np.all(np.diff(gap) < 0)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_three_level_matches_rk4(seed):
    rng = np.random.default_rng(seed)
    _, G = detailed_balance_rates(rng)
    d = DressedLevels(np.array([0.0, 1.0, 2.0]), np.zeros(3), G)
    A = rate_matrix(G)
    p0 = rng.dirichlet(np.ones(3))
    t = 2.0 / np.max(G)
    ref = rk4(A, p0, t, 1e-3 / np.max(G))
    got = evolve(InternalState(0.0, p0), d, [t])[0].populations
    np.testing.assert_allclose(got, ref, atol=1e-6)


def test_long_time_limit_is_thermal_state():
    ls = random_three_level(np.random.default_rng(7))
    g = PlanarGeometry(1e-6, GOLD)
    G = rates(ls, g, 300.0)
    d = DressedLevels(ls.energies, np.zeros(3), G)
    late = evolve(InternalState.pure(3, 0), d, [200.0 / np.min(G[G > 0])])[0]
    np.testing.assert_allclose(late.populations, thermal_state(ls, d, 300.0), atol=1e-9)


def test_stiff_rates():
    G = np.array([[0.0, 1e-3, 0.0], [1e-2, 0.0, 1e6], [0.0, 1e9, 0.0]])
    d = DressedLevels(np.array([0.0, 1.0, 2.0]), np.zeros(3), G)
    out = evolve(InternalState.pure(3, 2), d, np.geomspace(1e-12, 1e4, 30))
    for s in out:
        assert math.fsum(s.populations) == pytest.approx(1.0, abs=1e-9)
        assert np.all(s.populations >= 0)
    np.testing.assert_allclose(out[-1].populations, steady_state(d), atol=1e-8)


def test_coherences_decay():
    _, d = two_level_dressed(1.0, 10.0)
    c0 = np.array([[0.0, 0.4], [0.4, 0.0]])
    out = evolve(InternalState(0.0, [0.5, 0.5], c0), d, [0.0, 0.01, 0.1])
    rate = 0.5 * d.totals.sum()
    for s in out:
        assert s.offdiag[0, 1] == pytest.approx(0.4 * math.exp(-rate * s.time), rel=1e-12)
    mags = [s.offdiag[0, 1] for s in out]
    assert mags == sorted(mags, reverse=True)


def test_time_grid_checks():
    _, d = two_level_dressed()
    with pytest.raises(DomainError):
        evolve(InternalState.pure(2, 0), d, [1.0, 0.5])
    with pytest.raises(DomainError):
        evolve(InternalState.pure(2, 0, time=2.0), d, [1.0])
    with pytest.raises(DomainError):
        evolve(InternalState.pure(3, 0), d, [1.0])


def test_cyclic_rates_are_rejected():
    G = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    d = DressedLevels(np.array([0.0, 1.0, 2.0]), np.zeros(3), G)
    with pytest.raises(RateModelError):
        evolve(InternalState.pure(3, 0), d, [1.0])


def test_steady_state_examples():
    n = 3.0
    _, d = two_level_dressed(n, 5.0)
    np.testing.assert_allclose(steady_state(d), [(n + 1) / (2 * n + 1), n / (2 * n + 1)], rtol=1e-13)
    ls = LevelSystem.two_level(1e13, 1e-30)
    cold = DressedLevels(ls.energies, np.zeros(2), rates(ls, PlanarGeometry(1e-6, GOLD), 0.0))
    np.testing.assert_array_equal(steady_state(cold), [1.0, 0.0])


def test_disconnected_levels_are_reported():
    G = np.zeros((4, 4))
    G[1, 0] = 1.0
    G[3, 2] = 1.0
    d = DressedLevels(np.arange(4.0), np.zeros(4), G)
    with pytest.raises(MultipleSteadyStatesError) as info:
        steady_state(d)
    assert info.value.components == ((0, 1), (2, 3))


@settings(max_examples=40)
@given(st.integers(0, 2**31 - 1))
def test_steady_state_is_boltzmann(seed):
    T = 300.0
    E, G = detailed_balance_rates(np.random.default_rng(seed), T)
    d = DressedLevels(E, np.zeros(3), G)
    w = np.exp(-(E - E[0]) / (const.k_B * T))
    np.testing.assert_allclose(steady_state(d), w / w.sum(), atol=1e-8)


@settings(max_examples=40)
@given(st.integers(0, 2**31 - 1), st.floats(-6, 6))
def test_populations_conserved(seed, log_t):
    rng = np.random.default_rng(seed)
    _, G = detailed_balance_rates(rng)
    d = DressedLevels(np.array([0.0, 1.0, 2.0]), np.zeros(3), G)
    s = evolve(InternalState(0.0, rng.dirichlet(np.ones(3))), d, [10.0**log_t])[0]
    assert math.fsum(s.populations) == pytest.approx(1.0, abs=1e-9)
    assert np.all(s.populations >= 0)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thermalcp import constants as const
from thermalcp.atom import (
    DressedLevels,
    LevelSystem,
    dress,
    polarizability,
    rates,
    shifts,
    thermal_polarizability,
    thermal_state,
)
from thermalcp.errors import DomainError, PoleProximityError
from thermalcp.force import force_states_perturbative
from thermalcp.greens import PlanarGeometry
from thermalcp.materials import Drude, PerfectMirror, Vacuum
from thermalcp.thermal import photon_number, thermal_reduction_ratio

from conftest import GOLD, random_three_level

W10, D = 1.15e14, 0.08 * const.debye


def two_level():
    return LevelSystem.two_level(W10, D)


def test_level_system_validation():
    with pytest.raises(DomainError):
        LevelSystem.from_transitions([1.0, 0.0], {(0, 1): D})
    with pytest.raises(DomainError):
        LevelSystem([0.0], np.zeros((1, 1, 3)))
    with pytest.raises(DomainError):
        LevelSystem([0.0, 1e-20], np.zeros((3, 3, 3)))
    d = np.zeros((2, 2, 3), dtype=complex)
    d[0, 1, 0] = D
    with pytest.raises(DomainError):
        LevelSystem([0.0, 1e-20], d)
    with pytest.raises(DomainError):
        LevelSystem.from_transitions([0.0, 1e-20], {(0, 1): D}, labels=("a",))


def test_weights_isotropic_average():
    ls = LevelSystem.from_transitions([0.0, 1e-20], {(0, 1): [0.0, 0.0, D]})
    np.testing.assert_allclose(ls.weights[0, 1], D * D / 3)
    aniso = LevelSystem.from_transitions([0.0, 1e-20], {(0, 1): [0.0, 0.0, D]}, isotropic=False)
    np.testing.assert_allclose(aniso.weights[0, 1], [0.0, 0.0, D * D])


def test_static_polarizability_two_level():
    a0 = polarizability(two_level(), None, 0, 0.0)
    assert a0.real == pytest.approx(2 * D * D / (3 * const.hbar * W10), rel=1e-14)
    assert a0.imag == 0


def test_polarizability_decays_as_inverse_square_on_imaginary_axis():
    ls = two_level()
    a = [polarizability(ls, None, 0, 1j * xi).real for xi in (1e17, 2e17)]
    assert a[0] / a[1] == pytest.approx(4.0, rel=1e-5)


@given(st.floats(0.0, 1e17))
def test_two_level_antisymmetry(xi):
    ls = two_level()
    a0 = polarizability(ls, None, 0, 1j * xi, damped=False)
    a1 = polarizability(ls, None, 1, 1j * xi, damped=False)
    assert a1 == pytest.approx(-a0, rel=1e-12)


@given(st.floats(1e10, 1e17))
def test_undamped_polarizability_even_on_imaginary_axis(xi):
    ls = two_level()
    assert polarizability(ls, None, 0, 1j * xi, damped=False) == pytest.approx(
        polarizability(ls, None, 0, -1j * xi, damped=False), rel=1e-13
    )


def test_damped_polarizability_real_on_imaginary_axis():
    ls = two_level()
    d = DressedLevels(ls.energies, np.zeros(2), np.array([[0.0, 1e9], [3e11, 0.0]]))
    for xi in (0.0, 1e13, 1e15):
        a = polarizability(ls, d, 0, 1j * xi) + polarizability(ls, d, 0, -1j * xi)
        assert abs(a.imag) <= 1e-14 * abs(a.real)


def test_tensor_mode_matches_isotropic_trace():
    v = np.array([0.3, -0.4, 0.5]) * D / np.linalg.norm([0.3, -0.4, 0.5])
    aniso = LevelSystem.from_transitions([0.0, const.hbar * W10], {(0, 1): v}, isotropic=False)
    iso = LevelSystem.from_transitions([0.0, const.hbar * W10], {(0, 1): v})
    tensor = polarizability(aniso, None, 0, 2j * W10)
    np.testing.assert_allclose(tensor, tensor.T)
    assert np.trace(tensor).real / 3 == pytest.approx(polarizability(iso, None, 0, 2j * W10).real, rel=1e-13)


def test_pole_proximity_is_refused():
    with pytest.raises(PoleProximityError):
        polarizability(two_level(), None, 0, W10, damped=False)


def test_thermal_state_examples():
    ls = two_level()
    np.testing.assert_array_equal(thermal_state(ls, None, 0.0), [1.0, 0.0])
    n = photon_number(W10, 300.0)
    p = thermal_state(ls, None, 300.0)
    assert p[1] == pytest.approx(n / (2 * n + 1), rel=1e-12)
    hot = thermal_state(LevelSystem.two_level(1e9, D), None, 1e4)
    np.testing.assert_allclose(hot, [0.5, 0.5], atol=1e-4)


@given(st.integers(0, 2**31 - 1), st.floats(1.0, 5000.0))
def test_thermal_state_normalized(seed, T):
    ls = random_three_level(np.random.default_rng(seed))
    assert math.fsum(thermal_state(ls, None, T)) == pytest.approx(1.0, abs=1e-15)


def test_thermal_polarizability_ratio_is_reduction_factor():
    ls = two_level()
    ratio = thermal_polarizability(ls, None, 300.0, 0.0) / polarizability(ls, None, 0, 0.0)
    assert ratio.real == pytest.approx(thermal_reduction_ratio(W10, 300.0), rel=1e-12)
    assert thermal_polarizability(ls, None, 0.0, 1j * W10) == polarizability(ls, None, 0, 1j * W10)


def test_free_space_spontaneous_emission():
    ls = two_level()
    G = rates(ls, PlanarGeometry(1e-6, Vacuum()), 0.0)
    expected = W10**3 * D * D / (3 * math.pi * const.epsilon_0 * const.hbar * const.c**3)
    assert G[1, 0] == pytest.approx(expected, rel=1e-12)
    assert G[0, 1] == 0.0


def test_ground_state_is_stable_at_zero_temperature():
    G = rates(two_level(), PlanarGeometry(1e-6, GOLD), 0.0)
    assert G[0].sum() == 0.0


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(50.0, 2000.0), st.floats(1e-7, 1e-5))
def test_detailed_balance(seed, T, z):
    ls = random_three_level(np.random.default_rng(seed))
    G = rates(ls, PlanarGeometry(z, GOLD), T)
    om = ls.omega
    for n in range(3):
        for k in range(n):
            expected = math.exp(const.hbar * om[n, k] / (const.k_B * T))
            assert G[n, k] / G[k, n] == pytest.approx(expected, rel=1e-10)


def test_shifts_vanish_without_surface():
    np.testing.assert_array_equal(shifts(two_level(), PlanarGeometry(1e-6, Vacuum()), 300.0), 0.0)


def test_shifts_decay_with_distance():
    ls = two_level()
    near = shifts(ls, PlanarGeometry(1e-7, GOLD), 300.0)
    far = shifts(ls, PlanarGeometry(1e-4, GOLD), 300.0)
    assert np.all(np.abs(far) < 1e-3 * np.abs(near))


@pytest.mark.parametrize("material", [GOLD, PerfectMirror()])
def test_force_is_minus_gradient_of_shift(material):
    ls = two_level()
    T, z = 300.0, 2e-6
    g = PlanarGeometry(z, material)
    h = 1e-3 * z
    s = {j: shifts(ls, g.at(z + j * h), T, tol=1e-13) for j in (-2, -1, 1, 2)}
    deriv = (s[-2] - 8 * s[-1] + 8 * s[1] - s[2]) / (12 * h)
    forces = force_states_perturbative(ls, dress(ls, g, T), g, T)
    for n in range(2):
        assert -const.hbar * deriv[n] == pytest.approx(forces[n].total, rel=1e-5)


def test_refined_dressing_uses_shifted_frequencies():
    ls = LevelSystem.two_level(1.32e11, 3.07 * const.debye)
    g = PlanarGeometry(1e-7, GOLD)
    bare = dress(ls, g, 300.0)
    ref = dress(ls, g, 300.0, refine=True)
    assert ref.refined and not bare.refined
    np.testing.assert_allclose(ref.energies, ls.energies + const.hbar * ref.shifts, rtol=1e-15)
    assert not np.array_equal(ref.rates, bare.rates)
    np.testing.assert_array_equal(bare.energies, ls.energies)


def test_dressed_levels_validation():
    with pytest.raises(DomainError):
        DressedLevels([0.0, 1.0], [0.0, 0.0], [[0.0, -1.0], [0.0, 0.0]])
    with pytest.raises(DomainError):
        DressedLevels([0.0, 1.0], [0.0, 0.0], [[1.0, 0.0], [0.0, 0.0]])

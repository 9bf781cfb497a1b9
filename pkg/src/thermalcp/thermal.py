"""Bose-Einstein occupation, Matsubara frequencies and the thermal reduction factor."""
import numpy as np

from thermalcp import constants as const
from thermalcp.errors import DomainError


def _check_temperature(T):
    if np.any(np.asarray(T) < 0):
        raise DomainError(f"temperature must be non-negative, got {T}")


def _reduced_energy(omega, T):
    """hbar*omega/(k_B T) with T = 0 mapped to +inf."""
    omega = np.asarray(omega, dtype=float)
    if T == 0:
        return np.full_like(omega, np.inf)
    return const.hbar * omega / (const.k_B * T)


def photon_number(omega, T):
    """Thermal photon number n(omega) = 1/(exp(hbar omega/k_B T) - 1).

    Parameters
    ----------
    omega : float or array
        Angular frequency in rad/s, strictly positive.
    T : float
        Temperature in K.

    Returns
    -------
    float or ndarray
        Zero exactly at T = 0 and whenever hbar*omega/(k_B T) exceeds
        the overflow cutoff.
    """
    _check_temperature(T)
    omega_arr = np.asarray(omega, dtype=float)
    if np.any(omega_arr <= 0):
        raise DomainError("photon_number requires omega > 0")
    x = _reduced_energy(omega_arr, T)
    with np.errstate(over="ignore"):
        n = np.where(x > const.EXP_CUTOFF, 0.0, 1.0 / np.expm1(np.minimum(x, const.EXP_CUTOFF)))
    return float(n) if np.ndim(omega) == 0 else n


def photon_number_complex(omega, T):
    """Photon number continued to a complex frequency (Re omega > 0)."""
    _check_temperature(T)
    if T == 0:
        return 0.0 + 0.0j
    x = const.hbar * complex(omega) / (const.k_B * T)
    if x.real > const.EXP_CUTOFF:
        return 0.0 + 0.0j
    return 1.0 / np.expm1(x)


def matsubara_frequency(N, T):
    """Matsubara frequency xi_N = 2 pi k_B T N / hbar in rad/s."""
    if np.any(np.asarray(N) < 0):
        raise DomainError("Matsubara index must be non-negative")
    if T <= 0:
        raise DomainError("Matsubara frequencies need T > 0; use the zero-temperature integral")
    return const.TWO_PI * const.k_B * T * N / const.hbar


def thermal_reduction_ratio(omega10, T):
    """Equilibrium reduction factor r_T = tanh(hbar omega10 / 2 k_B T).

    Equal to 1/(2 n + 1); returns exactly 1 at T = 0 and beyond the
    overflow cutoff. Use :func:`one_minus_thermal_reduction_ratio` to
    resolve departures from unity below double precision.
    """
    _check_temperature(T)
    if omega10 <= 0:
        raise DomainError("thermal_reduction_ratio requires omega10 > 0")
    x = float(_reduced_energy(omega10, T))
    if x > const.EXP_CUTOFF:
        return 1.0
    return float(np.tanh(0.5 * x))


def one_minus_thermal_reduction_ratio(omega10, T):
    """1 - r_T = 2/(exp(x) + 1), evaluated without cancellation."""
    _check_temperature(T)
    if omega10 <= 0:
        raise DomainError("omega10 must be positive")
    x = float(_reduced_energy(omega10, T))
    if np.isinf(x):
        return 0.0
    # 2 e^{-x} / (1 + e^{-x}); underflows gracefully to 0
    em = np.exp(-x)
    return float(2.0 * em / (1.0 + em))

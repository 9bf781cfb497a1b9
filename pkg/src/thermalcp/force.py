"""Casimir-Polder forces along the surface normal.

Sign convention: a negative force points toward the surface (attraction).
"""
from dataclasses import dataclass
import math
import warnings

import numpy as np

from thermalcp import constants as const
from thermalcp.atom import DressedLevels, _alpha_diag, _resonant_parts, thermal_state
from thermalcp.errors import AccuracyWarning, DomainError
from thermalcp.greens import (
    PlanarGeometry,
    scatter_complex_frequency,
    static_reflection_p,
    xi2_scatter_imag_axis,
)
from thermalcp.materials import Material, PerfectMirror, Vacuum
from thermalcp.summation import N_MAX, frequency_sum, matsubara_sum, zero_temperature_integral
from thermalcp.thermal import photon_number_complex

#: Gamma/omega above which the complex-frequency continuation is flagged
WEAK_COUPLING_LIMIT = 0.1


@dataclass(frozen=True)
class ForceBreakdown:
    """Force on one internal eigenstate split by physical origin (N)."""

    state: int
    nonresonant: float
    resonant_emission: float
    resonant_absorption: float
    n_terms: int = 0
    flags: tuple = ()

    @property
    def resonant(self):
        return self.resonant_emission + self.resonant_absorption

    @property
    def total(self):
        return self.nonresonant + self.resonant_emission + self.resonant_absorption


def _alpha_columns(alpha, xi):
    """Evaluate a polarizability callable as diagonal components, shape (3, len)."""
    a = np.asarray(alpha(xi))
    if a.ndim <= 1:
        a = np.broadcast_to(a, np.shape(xi))
        return np.vstack([a, a, a])
    return a


def _force_term(alpha, g, convention):
    def term(xi):
        S = xi2_scatter_imag_axis(g, xi)
        grad = S.gradient(convention) * np.ones_like(xi)
        return -const.mu_0 * np.sum(np.real(_alpha_columns(alpha, xi)) * grad, axis=0)
    return term


def _matsubara_force(alpha, g, T, tol, n_max, convention="coincident"):
    value, n = matsubara_sum(_force_term(alpha, g, convention), T, tol=tol, n_max=n_max)
    return float(value[0]), n


def force_macroscopic(alpha, g, T, tol=1e-8, n_max=N_MAX):
    """Lifshitz-type Casimir-Polder force from a given polarizability.

    ``-mu_0 k_B T sum'_N xi_N^2 alpha(i xi_N) d/dz Tr G(z, z, i xi_N)``.

    Parameters
    ----------
    alpha : callable
        ``alpha(xi)`` for an array of imaginary frequencies, returning
        either the isotropic scalar polarizability (shape ``(len,)``) or
        the three diagonal components (shape ``(3, len)``), in C m^2/V.
    g : PlanarGeometry
    T : float
        Temperature in K, ``> 0``.
    tol : float
        Relative truncation threshold for the Matsubara sum.
    """
    if not T > 0:
        raise DomainError("force_macroscopic needs T > 0; use force_zero_temperature")
    return _matsubara_force(alpha, g, T, tol, n_max)[0]


def force_zero_temperature(alpha, g, tol=1e-8, hints=()):
    """Zero-temperature force, the continuous-frequency version of the Matsubara sum.

    ``-(mu_0 hbar / 2 pi) int_0^inf dxi xi^2 alpha(i xi) d/dz Tr G(z, z, i xi)``.
    ``hints`` are characteristic frequencies of ``alpha`` used as
    integration breakpoints.
    """
    value, _ = zero_temperature_integral(_force_term(alpha, g, "coincident"), g.z, tol=tol, hints=hints)
    return float(value[0])


def imag_axis_polarizability(ls, dressed=None, state=0, damped=False):
    """Callable xi -> diagonal polarizability of ``state`` on the imaginary axis."""
    dressed = DressedLevels.bare(ls) if dressed is None else dressed

    def alpha(xi):
        return _alpha_diag(ls, dressed, 1j * np.atleast_1d(xi), damped, states=[state])[0].real
    return alpha


def thermal_imag_axis_polarizability(ls, dressed, T, damped=False):
    """Callable xi -> thermally weighted diagonal polarizability."""
    dressed = DressedLevels.bare(ls) if dressed is None else dressed
    p = thermal_state(ls, dressed, T)

    def alpha(xi):
        a = _alpha_diag(ls, dressed, 1j * np.atleast_1d(xi), damped).real
        return np.einsum("n,nil->il", p, a)
    return alpha


def _nonresonant(ls, dressed, g, T, n, tol, n_max):
    alpha = imag_axis_polarizability(ls, dressed, n)
    if T > 0:
        return _matsubara_force(alpha, g, T, tol, n_max)
    hints = tuple(np.abs(dressed.omega[n][np.arange(ls.size) != n]))
    return force_zero_temperature(alpha, g, tol=tol, hints=hints), 0


def force_state_perturbative(ls, dressed, g, T, n, tol=1e-8, n_max=N_MAX):
    """Force on eigenstate ``n`` with linewidths neglected.

    Matsubara part with alpha_n plus resonant emission (to lower
    levels) and absorption (to upper levels) parts evaluated with
    Re G at the transition frequencies.
    """
    dressed = DressedLevels.bare(ls) if dressed is None else dressed
    nonres, n_terms = _nonresonant(ls, dressed, g, T, n, tol, n_max)
    em, ab = _resonant_parts(ls, dressed.omega, g, T, derivative=True)
    return ForceBreakdown(n, float(nonres), float(const.mu_0 * em[n]), float(const.mu_0 * ab[n]), n_terms)


def force_states_perturbative(ls, dressed, g, T, tol=1e-8, n_max=N_MAX):
    """:func:`force_state_perturbative` for every level."""
    return [force_state_perturbative(ls, dressed, g, T, n, tol, n_max) for n in range(ls.size)]


def force_state_exact(ls, dressed, g, T, n, tol=1e-8, n_max=N_MAX):
    """Force on eigenstate ``n`` including linewidths and shifted frequencies.

    The Matsubara part uses [alpha_n(i xi) + alpha_n(-i xi)] with the
    one-sided Green-tensor gradient; resonant parts evaluate G at the
    complex frequencies Omega_nk (emission) and Omega*_kn (absorption),
    continued from the real-axis representation.
    """
    flags = []
    om = dressed.omega
    Om = dressed.complex_frequencies
    W = ls.weights
    ratio = np.max(np.abs(Om.imag[W.sum(axis=2) > 0]) / np.abs(om[W.sum(axis=2) > 0]), initial=0.0)
    if ratio > WEAK_COUPLING_LIMIT:
        flags.append("weak-coupling")
        warnings.warn(
            f"linewidth/frequency ratio {ratio:.3g} exceeds {WEAK_COUPLING_LIMIT}; "
            "complex-frequency continuation is outside its validity range",
            AccuracyWarning,
            stacklevel=2,
        )

    def alpha_sym(xi):
        xi = np.atleast_1d(xi)
        both = _alpha_diag(ls, dressed, np.concatenate([1j * xi, -1j * xi]), damped=True, states=[n])[0]
        return (both[:, : xi.size] + both[:, xi.size:]).real

    if T > 0:
        nonres, n_terms = _matsubara_force(alpha_sym, g, T, tol, n_max, convention="one-sided")
    else:
        term = _force_term(alpha_sym, g, "one-sided")
        nonres = float(zero_temperature_integral(term, g.z, tol=tol, hints=tuple(np.abs(om[n])))[0][0])
        n_terms = 0

    em = ab = 0.0
    for k in range(ls.size):
        if k == n or not np.any(W[n, k]):
            continue
        if om[n, k] > 0:
            w = Om[n, k]
            G = scatter_complex_frequency(g, w)
            val = w * w * (photon_number_complex(w, T) + 1.0) * np.dot(W[n, k], G.gradient("one-sided"))
            em += 2.0 * val.real
        else:
            w = np.conj(Om[k, n])
            G = scatter_complex_frequency(g, w)
            val = w * w * photon_number_complex(w, T) * np.dot(W[n, k], G.gradient("one-sided"))
            ab -= 2.0 * val.real
    return ForceBreakdown(n, float(nonres), float(const.mu_0 * em), float(const.mu_0 * ab), n_terms, tuple(flags))


def force_total(ls, dressed, g, T, states, breakdowns=None, tol=1e-8):
    """Population-weighted force sum_n sigma_nn(t) F_n for each internal state.

    ``breakdowns`` may supply precomputed per-level forces (e.g. from
    :func:`force_state_exact`); by default the perturbative ones are used.
    """
    if breakdowns is None:
        breakdowns = force_states_perturbative(ls, dressed, g, T, tol)
    totals = np.array([b.total for b in breakdowns])
    out = []
    for s in states:
        p = np.asarray(s.populations if hasattr(s, "populations") else s, dtype=float)
        if abs(p.sum() - 1.0) > 1e-9:
            raise DomainError("populations must sum to one")
        out.append(math.fsum(p * totals))
    return out


# ---------------------------------------------------------------------------
# two half-spaces


@dataclass(frozen=True, eq=False)
class DiluteGas(Material):
    """Half-space filled with a dilute gas: eps = 1 + density * alpha / epsilon_0.

    ``polarizability`` maps imaginary frequencies xi (array) to the
    isotropic polarizability alpha(i xi).
    """

    density: float
    polarizability: object

    def chi_imag(self, xi):
        xi = np.asarray(xi, dtype=float)
        a = np.asarray(self.polarizability(np.atleast_1d(xi)), dtype=float).reshape(np.shape(xi) or (1,))
        out = self.density * a / const.epsilon_0
        return out if xi.ndim else float(out[0])

    def chi(self, omega):
        raise NotImplementedError("dilute gas permittivity is only available on the imaginary axis")

    def static_eps(self):
        return 1.0 + float(self.chi_imag(0.0))


def _reflection_dimless(m, xi, q, length):
    """(r_s, r_p) on the imaginary axis for dimensionless q = 2 kappa length."""
    if isinstance(m, PerfectMirror):
        return -np.ones_like(q), np.ones_like(q)
    if isinstance(m, Vacuum):
        return np.zeros_like(q), np.zeros_like(q)
    chi = float(m.chi_imag_xi2(xi)) * (2.0 * length / const.c) ** 2
    q1 = np.sqrt(q * q + chi)
    s = q + q1
    with np.errstate(divide="ignore", invalid="ignore"):
        r_s = np.where(s > 0, -chi / (s * s), 0.0)
    if xi == 0:
        r_p = np.full_like(q, static_reflection_p(m))
    else:
        eps_m1 = float(m.chi_imag(xi))
        r_p = (eps_m1 * q - chi / s) / ((eps_m1 + 1.0) * q + q1)
    return r_s, r_p


def _plate_term(m1, m2, d, derivative):
    from thermalcp.quadrature import integrate
    from thermalcp.greens import EPSREL, U_MAX

    def single(xi):
        alpha = 2.0 * xi * d / const.c

        def integrand(u):
            q = alpha + u
            rs1, rp1 = _reflection_dimless(m1, xi, q, d)
            rs2, rp2 = _reflection_dimless(m2, xi, q, d)
            decay = np.exp(-q)
            out = np.zeros_like(q)
            for x in (rs1 * rs2 * decay, rp1 * rp2 * decay):
                with np.errstate(divide="ignore", invalid="ignore"):
                    if derivative:
                        f = -q * x / (1.0 - x) ** 2
                    else:
                        f = x / (1.0 - x)
                out = out + np.where(x == 0, 0.0, f)
            return (q * q * out)[None, :]

        if isinstance(m1, Vacuum) or isinstance(m2, Vacuum):
            return 0.0
        val, _ = integrate(integrand, [0.0, 1.0, 4.0, 16.0, 40.0, U_MAX + alpha], epsrel=EPSREL)
        # -(1/pi) int dkappa kappa^2 sum x/(1-x), kappa = q/(2d); derivative carries 1/d
        scale = -1.0 / (math.pi * (2.0 * d) ** 3)
        return scale * float(val[0].real) / (d if derivative else 1.0)

    def term(xi):
        return np.array([single(float(x)) for x in np.atleast_1d(xi)])
    return term


def _plate(m1, m2, d, T, tol, derivative, n_max=N_MAX):
    if not d > 0:
        raise DomainError("plate separation must be positive")
    if T < 0:
        raise DomainError("temperature must be non-negative")
    value, _ = frequency_sum(_plate_term(m1, m2, d, derivative), T, d, tol=tol, n_max=n_max)
    return float(value[0])


def plate_pressure(m1, m2, d, T, tol=1e-8):
    """Lifshitz pressure between two half-spaces a distance ``d`` apart (Pa).

    Negative values are attractive. ``T = 0`` switches to the
    zero-temperature frequency integral.
    """
    return _plate(m1, m2, d, T, tol, derivative=False)


def plate_pressure_gradient(m1, m2, d, T, tol=1e-8):
    """d(pressure)/d(separation) in Pa/m, by differentiating under the integral."""
    return _plate(m1, m2, d, T, tol, derivative=True)


@dataclass(frozen=True)
class DiluteGasResult:
    """Outcome of the dilute-gas consistency check (forces in N)."""

    deviation: float
    deviation_half_density: float
    extrapolated: float
    per_atom_force: float
    macroscopic_force: float


def dilute_gas_check(ls, g, T, eta, dressed=None, tol=1e-8, strict=True):
    """Compare the linearized two-half-space pressure with the single-atom force.

    A half-space of gas with number density ``eta`` and the ground-state
    polarizability of ``ls`` faces ``g.material`` at separation ``g.z``.
    The per-atom force ``-(1/eta) dP/dd`` is compared with
    :func:`force_macroscopic`; the relative deviation is evaluated at
    ``eta`` and ``eta/2`` and extrapolated linearly to zero density.
    """
    dressed = DressedLevels.bare(ls) if dressed is None else dressed
    alpha_diag = imag_axis_polarizability(ls, dressed, 0)

    def alpha_scalar(xi):
        return alpha_diag(xi).mean(axis=0)

    alpha0 = float(alpha_scalar(np.array([0.0]))[0])
    if strict and eta * alpha0 / const.epsilon_0 > 1e-6:
        raise DomainError("density too high for the linear regime (eta alpha(0)/eps0 > 1e-6)")
    if T > 0:
        ref = force_macroscopic(alpha_scalar, g, T, tol=tol)
    else:
        ref = force_zero_temperature(alpha_scalar, g, tol=tol)

    def per_atom(density):
        gas = DiluteGas(density, alpha_scalar)
        return -plate_pressure_gradient(gas, g.material, g.z, T, tol=tol) / density

    f1 = per_atom(eta)
    f2 = per_atom(0.5 * eta)
    if ref == 0:
        dev1 = dev2 = 0.0 if f1 == 0 and f2 == 0 else math.inf
    else:
        dev1 = (f1 - ref) / abs(ref)
        dev2 = (f2 - ref) / abs(ref)
    extrap = 2.0 * dev2 - dev1
    if abs(dev1) > 1e-6 and abs(dev1 - dev2) > 0.1 * abs(dev1):
        warnings.warn(
            f"per-atom force changes by {abs(dev1 - dev2):.3g} (relative) when halving the density; "
            "the gas is not in the linear regime",
            AccuracyWarning,
            stacklevel=2,
        )
    return DiluteGasResult(abs(dev1), abs(dev2), abs(extrap), f1, ref)

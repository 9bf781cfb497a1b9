"""Permittivity models for the half-space below the atom.

All parameters are angular frequencies in rad/s. Models are immutable
and hashable so they can key caches.
"""
from dataclasses import dataclass
import math

import numpy as np

from thermalcp.errors import DomainError, NoPermittivityError


def _nonneg(name, value):
    if not value >= 0:
        raise DomainError(f"{name} must be non-negative, got {value}")


class Material:
    """Base class. Subclasses provide the susceptibility on both axes."""

    def eps(self, omega):
        """Permittivity at (possibly complex) angular frequency."""
        return 1.0 + self.chi(omega)

    def eps_imag(self, xi):
        """Real permittivity on the imaginary axis, ``xi > 0``."""
        return 1.0 + self.chi_imag(xi)

    def chi_imag_xi2(self, xi):
        """(eps(i xi) - 1) * xi**2, finite as xi -> 0."""
        xi = np.asarray(xi, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.chi_imag(xi) * xi**2
        return np.where(xi == 0, self.static_chi_xi2(), out)

    def static_eps(self):
        """eps(i xi) as xi -> 0; ``math.inf`` for conductors."""
        raise NotImplementedError

    def static_chi_xi2(self):
        """Limit of (eps(i xi) - 1) xi**2 at xi -> 0."""
        return 0.0


@dataclass(frozen=True)
class Vacuum(Material):
    def chi(self, omega):
        return np.zeros_like(np.asarray(omega, dtype=complex))

    def chi_imag(self, xi):
        return np.zeros_like(np.asarray(xi, dtype=float))

    def static_eps(self):
        return 1.0


@dataclass(frozen=True)
class PerfectMirror(Material):
    """Ideal conductor; has reflection coefficients but no permittivity."""

    def chi(self, omega):
        raise NoPermittivityError("a perfect mirror has no permittivity")

    def chi_imag(self, xi):
        raise NoPermittivityError("a perfect mirror has no permittivity")

    def static_eps(self):
        return math.inf


@dataclass(frozen=True)
class Drude(Material):
    plasma_frequency: float
    relaxation_rate: float

    def __post_init__(self):
        _nonneg("plasma_frequency", self.plasma_frequency)
        _nonneg("relaxation_rate", self.relaxation_rate)

    def chi(self, omega):
        omega = np.asarray(omega, dtype=complex)
        return -self.plasma_frequency**2 / (omega * (omega + 1j * self.relaxation_rate))

    def chi_imag(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.plasma_frequency**2 / (xi * (xi + self.relaxation_rate))

    def chi_imag_xi2(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.relaxation_rate == 0:
            return np.full_like(xi, self.plasma_frequency**2)
        return self.plasma_frequency**2 * xi / (xi + self.relaxation_rate)

    def static_eps(self):
        return math.inf if self.plasma_frequency > 0 else 1.0

    def static_chi_xi2(self):
        # transverse static response only survives without relaxation
        return self.plasma_frequency**2 if self.relaxation_rate == 0 else 0.0


@dataclass(frozen=True)
class Plasma(Material):
    plasma_frequency: float

    def __post_init__(self):
        _nonneg("plasma_frequency", self.plasma_frequency)

    def chi(self, omega):
        omega = np.asarray(omega, dtype=complex)
        return -self.plasma_frequency**2 / omega**2

    def chi_imag(self, xi):
        return self.plasma_frequency**2 / np.asarray(xi, dtype=float) ** 2

    def chi_imag_xi2(self, xi):
        return np.full_like(np.asarray(xi, dtype=float), self.plasma_frequency**2)

    def static_eps(self):
        return math.inf if self.plasma_frequency > 0 else 1.0

    def static_chi_xi2(self):
        return self.plasma_frequency**2


@dataclass(frozen=True)
class DrudeLorentz(Material):
    """Sum of Lorentz oscillators plus an optional free-carrier part.

    ``oscillators`` holds ``(strength, resonance, damping)`` triples with
    strength in rad^2/s^2, so each term reads
    ``strength / (resonance**2 - omega**2 - 1j*damping*omega)``.
    """

    oscillators: tuple = ()
    drude_part: Material | None = None

    def __post_init__(self):
        osc = tuple(tuple(float(v) for v in o) for o in self.oscillators)
        for s, w, g in osc:
            _nonneg("oscillator strength", s)
            _nonneg("oscillator resonance", w)
            _nonneg("oscillator damping", g)
        object.__setattr__(self, "oscillators", osc)
        if self.drude_part is not None and not isinstance(self.drude_part, (Drude, Plasma)):
            raise DomainError("drude_part must be a Drude or Plasma model")

    def _drude(self):
        return self.drude_part if self.drude_part is not None else Vacuum()

    def chi(self, omega):
        omega = np.asarray(omega, dtype=complex)
        out = self._drude().chi(omega)
        for s, w, g in self.oscillators:
            out = out + s / (w**2 - omega**2 - 1j * g * omega)
        return out

    def chi_imag(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = self._drude().chi_imag(xi)
        for s, w, g in self.oscillators:
            out = out + s / (w**2 + xi**2 + g * xi)
        return out

    def chi_imag_xi2(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = self._drude().chi_imag_xi2(xi)
        for s, w, g in self.oscillators:
            if w == 0:
                # free-carrier-like term with zero restoring force
                out = out + s * xi / (xi + g) if g > 0 else out + s
            else:
                out = out + s * xi**2 / (w**2 + xi**2 + g * xi)
        return out

    def static_eps(self):
        if self.drude_part is not None and self.drude_part.static_eps() == math.inf:
            return math.inf
        total = 1.0
        for s, w, _ in self.oscillators:
            if w == 0:
                if s > 0:
                    return math.inf
                continue
            total += s / w**2
        return total

    def static_chi_xi2(self):
        out = self._drude().static_chi_xi2()
        for s, w, g in self.oscillators:
            if w == 0 and g == 0:
                out += s
        return out


def eps_imag_axis(m, xi):
    """Permittivity eps(i xi) for xi > 0 (real, >= 1)."""
    if np.any(np.asarray(xi) <= 0):
        raise DomainError("eps_imag_axis requires xi > 0")
    out = m.eps_imag(xi)
    return float(out) if np.ndim(out) == 0 else out


def eps_real_axis(m, omega):
    """Complex permittivity eps(omega) for real omega > 0."""
    if np.any(np.asarray(omega) <= 0):
        raise DomainError("eps_real_axis requires omega > 0")
    out = m.eps(omega)
    return complex(out) if np.ndim(out) == 0 else out

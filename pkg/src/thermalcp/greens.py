"""Scattering Green tensor of a single planar interface at coincident points.

The atom sits at height ``z`` in vacuum above a homogeneous half-space.
Planar symmetry leaves only ``xx = yy`` and ``zz`` non-zero. Values
follow the convention in which the force reads
``-mu_0 k_B T sum' xi^2 alpha(i xi) d/dz Tr G(z, z, i xi)``.

Reflection conventions: ``r_s = (k_z - k_z1)/(k_z + k_z1)`` and
``r_p = (eps k_z - k_z1)/(eps k_z + k_z1)``, so a perfect mirror has
``(r_s, r_p) = (-1, +1)``.
"""
from dataclasses import dataclass
from functools import lru_cache
import math
import warnings

import numpy as np

from thermalcp import constants as const
from thermalcp.errors import AccuracyWarning, DomainError
from thermalcp.materials import Material, PerfectMirror, Vacuum
from thermalcp.quadrature import integrate

#: relative tolerance of every wavevector quadrature
EPSREL = 1e-10
#: upper cut of the dimensionless decay variable u = 2 kappa z (e^-100 tail)
U_MAX = 100.0
#: phase 2 omega z / c above which real-axis results are flagged
OSCILLATION_BUDGET = 2.0e4
#: retarded shift omega -> omega (1 + i LOSSLESS_SHIFT) for lossless media with a
#: surface-plasmon pole on the real wavevector axis
LOSSLESS_SHIFT = 1e-9

_C2 = const.c**2
_INV_8PI = 1.0 / (8.0 * math.pi)


@dataclass(frozen=True)
class PlanarGeometry:
    """Atom at height ``z`` (m) above a half-space made of ``material``."""

    z: float
    material: Material

    def __post_init__(self):
        if not self.z > 0:
            raise DomainError(f"atom height must be positive, got {self.z}")

    def at(self, z):
        return PlanarGeometry(z, self.material)


@dataclass(frozen=True)
class GreenScatter:
    """Coincident-point scattering Green tensor and its z-gradients.

    ``d_xx_dz`` and ``d_zz_dz`` are derivatives of the coincident-point
    values G(z, z). Differentiating with respect to one argument only
    gives half of that; see :meth:`gradient`.
    """

    xx: complex
    zz: complex
    d_xx_dz: complex
    d_zz_dz: complex
    error: float = 0.0

    @property
    def yy(self):
        return self.xx

    @property
    def trace(self):
        return 2 * self.xx + self.zz

    @property
    def d_trace_dz(self):
        return 2 * self.d_xx_dz + self.d_zz_dz

    def diagonal(self):
        return np.array([self.xx, self.xx, self.zz])

    def gradient(self, convention="coincident"):
        """Diagonal z-gradient under the chosen derivative convention.

        ``"coincident"`` differentiates G(z, z) as a whole;
        ``"one-sided"`` differentiates the field point only, G(r, r_A)
        at r = r_A, which by reciprocity is half the coincident value.
        """
        d = np.array([self.d_xx_dz, self.d_xx_dz, self.d_zz_dz])
        if convention == "coincident":
            return d
        if convention == "one-sided":
            return 0.5 * d
        raise ValueError(f"unknown derivative convention {convention!r}")

    def real(self):
        return GreenScatter(
            np.real(self.xx), np.real(self.zz), np.real(self.d_xx_dz), np.real(self.d_zz_dz), self.error
        )

    def imag(self):
        return GreenScatter(
            np.imag(self.xx), np.imag(self.zz), np.imag(self.d_xx_dz), np.imag(self.d_zz_dz), self.error
        )

    def scaled(self, factor):
        return GreenScatter(
            factor * self.xx, factor * self.zz, factor * self.d_xx_dz, factor * self.d_zz_dz,
            abs(factor) * self.error,
        )


_ZERO = GreenScatter(0.0, 0.0, 0.0, 0.0)


def _sqrt_upper(x):
    """Square root on the branch with non-negative imaginary part."""
    r = np.sqrt(np.asarray(x, dtype=complex))
    return np.where(r.imag < 0, -r, r)


def static_reflection_p(material):
    """Static p-reflection coefficient (eps0 - 1)/(eps0 + 1); 1 for conductors."""
    if isinstance(material, PerfectMirror):
        return 1.0
    eps0 = material.static_eps()
    if math.isinf(eps0):
        return 1.0
    return (eps0 - 1.0) / (eps0 + 1.0)


def fresnel(m, axis, freq, kpar):
    """Fresnel coefficients (r_s, r_p) of the vacuum/half-space interface.

    Parameters
    ----------
    m : Material
    axis : {"real", "imaginary"}
    freq : float
        Angular frequency (omega on the real axis, xi on the imaginary
        axis), ``>= 0``. At zero frequency the per-model static limits
        are returned.
    kpar : float or array
        In-plane wavevector in 1/m, ``>= 0``.
    """
    if axis not in ("real", "imaginary"):
        raise ValueError("axis must be 'real' or 'imaginary'")
    kpar = np.asarray(kpar, dtype=float)
    if freq < 0 or np.any(kpar < 0):
        raise DomainError("fresnel needs freq >= 0 and kpar >= 0")
    shape = kpar.shape
    if isinstance(m, PerfectMirror):
        return np.full(shape, -1.0 + 0j)[()], np.full(shape, 1.0 + 0j)[()]
    if freq == 0 or axis == "imaginary":
        a = freq / const.c
        chi = float(m.chi_imag_xi2(freq)) / _C2
        kappa = np.sqrt(kpar**2 + a**2)
        kappa1 = np.sqrt(kappa**2 + chi)
        with np.errstate(divide="ignore", invalid="ignore"):
            r_s = np.where(kappa1 > 0, -chi / (kappa + kappa1) ** 2, 0.0)
        if freq == 0:
            r_p = np.full(shape, static_reflection_p(m))
        else:
            eps = float(m.eps_imag(freq))
            r_p = ((eps - 1.0) * kappa - chi / (kappa + kappa1)) / (eps * kappa + kappa1)
        return (r_s + 0j)[()], (r_p + 0j)[()]
    k = freq / const.c
    eps = complex(m.eps(freq))
    chi_k2 = (eps - 1.0) * k**2
    kz = _sqrt_upper(k**2 - kpar**2)
    r_s, r_p = _fresnel_kz(eps, chi_k2, kz)
    return r_s[()], r_p[()]


def _fresnel_kz(eps, chi_k2, kz):
    """Reflection coefficients from the vacuum normal wavevector ``kz``."""
    kz1 = _sqrt_upper(kz**2 + chi_k2)
    s = kz + kz1
    r_s = -chi_k2 / s**2
    r_p = ((eps - 1.0) * kz - chi_k2 / s) / (eps * kz + kz1)
    return r_s, r_p


def imG_freespace(omega):
    """Imaginary part of each diagonal element of the free-space Green
    tensor at coincident points, omega/(6 pi c), in 1/m."""
    if np.any(np.asarray(omega) <= 0):
        raise DomainError("imG_freespace requires omega > 0")
    return np.asarray(omega) / (6.0 * math.pi * const.c)


# ---------------------------------------------------------------------------
# perfect mirror in closed form (a = xi/c, or a = -i omega/c off the imaginary axis)


def _mirror_xi2(a, z):
    """c^2 a^2 G for a perfect mirror: (xx, zz, d xx/dz, d zz/dz)."""
    pref = _C2 * np.exp(-2.0 * a * z) / math.pi
    z2, z3, z4 = z * z, z**3, z**4
    xx = -pref / 8.0 * (a * a / z + a / (2 * z2) + 1.0 / (4 * z3))
    zz = -pref / 4.0 * (a / (2 * z2) + 1.0 / (4 * z3))
    dxx = -pref / 8.0 * (-2 * a**3 / z - 2 * a * a / z2 - 1.5 * a / z3 - 0.75 / z4)
    dzz = -pref / 4.0 * (-a * a / z2 - 1.5 * a / z3 - 0.75 / z4)
    return xx, zz, dxx, dzz


# ---------------------------------------------------------------------------
# imaginary axis


def _static_xi2(material, z):
    r_p0 = static_reflection_p(material)
    xx = -_C2 * r_p0 / (32.0 * math.pi * z**3)
    zz = 2.0 * xx
    return GreenScatter(xx, zz, -3.0 * xx / z, -3.0 * zz / z)


@lru_cache(maxsize=65536)
def _xi2_quadrature(material, z, xi):
    """xi^2 G(i xi) for xi > 0 by wavevector quadrature."""
    alpha = 2.0 * xi * z / const.c
    chi = float(material.chi_imag_xi2(xi)) * (2.0 * z / const.c) ** 2  # dimensionless (eps-1) alpha^2
    eps_m1 = float(material.chi_imag(xi))

    def integrand(u):
        q = alpha + u
        q1 = np.sqrt(q * q + chi)
        s = q + q1
        r_s = -chi / (s * s)
        r_p = (eps_m1 * q - chi / s) / ((eps_m1 + 1.0) * q + q1)
        w = np.exp(-u)
        fx = w * (alpha * alpha * r_s - q * q * r_p)
        fz = -2.0 * w * (q * q - alpha * alpha) * r_p
        return np.vstack([fx, fz, -q * fx, -q * fz])

    brk = [0.0, 1.0, 4.0, 16.0, 40.0, U_MAX]
    u_r = math.sqrt(chi) - alpha if chi > 0 else -1.0
    if 0 < u_r < U_MAX:
        brk = sorted(set(brk + [u_r]))
    vals, err = integrate(integrand, brk, epsrel=EPSREL)
    pref = _C2 * _INV_8PI / (2.0 * z) ** 3 * math.exp(-alpha)
    xx, zz, dxx, dzz = (pref * v for v in vals.real)
    return GreenScatter(xx, zz, dxx / z, dzz / z, pref * err)


def _xi2_single(material, z, xi):
    if isinstance(material, Vacuum):
        return _ZERO
    if xi == 0:
        return _static_xi2(material, z)
    if isinstance(material, PerfectMirror):
        return GreenScatter(*_mirror_xi2(xi / const.c, z))
    return _xi2_quadrature(material, float(z), float(xi))


def xi2_scatter_imag_axis(g, xi):
    """xi^2 G(z, z, i xi), finite for every xi >= 0.

    This is the combination entering Matsubara sums. At xi = 0 the value
    is the closed-form static limit, which depends on the material only
    through its static p-reflection coefficient. ``xi`` may be an array,
    in which case each field of the result is an array.
    """
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(xi_arr < 0):
        raise DomainError("xi must be non-negative")
    if xi_arr.ndim == 0:
        return _xi2_single(g.material, g.z, float(xi_arr))
    m = g.material
    if isinstance(m, PerfectMirror):
        with np.errstate(divide="ignore", invalid="ignore"):
            parts = _mirror_xi2(xi_arr / const.c, g.z)
        static = _static_xi2(m, g.z)
        fields = [np.where(xi_arr == 0, s, p) for s, p in zip(
            (static.xx, static.zz, static.d_xx_dz, static.d_zz_dz), parts)]
        return GreenScatter(*fields)
    items = [_xi2_single(m, g.z, float(x)) for x in xi_arr]
    return GreenScatter(
        np.array([i.xx for i in items]),
        np.array([i.zz for i in items]),
        np.array([i.d_xx_dz for i in items]),
        np.array([i.d_zz_dz for i in items]),
        float(sum(i.error for i in items)),
    )


def scatter_imag_axis(g, xi):
    """Scattering Green tensor G(z, z, i xi) on the imaginary axis (real).

    At xi = 0 the tensor diverges for any surface with non-zero static
    p-reflection and infinities are returned; use
    :func:`xi2_scatter_imag_axis` for the finite combination.
    """
    if xi < 0:
        raise DomainError("xi must be non-negative")
    s = xi2_scatter_imag_axis(g, xi)
    if xi == 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            return GreenScatter(*(np.float64(v) / 0.0 if v != 0 else 0.0
                                  for v in (s.xx, s.zz, s.d_xx_dz, s.d_zz_dz)))
    return s.scaled(1.0 / xi**2)


# ---------------------------------------------------------------------------
# real axis and its continuation to complex frequency


def _check_oscillation(omega, z):
    phase = 2.0 * abs(omega) * z / const.c
    if phase > OSCILLATION_BUDGET:
        warnings.warn(
            f"propagating-wave phase 2 omega z/c = {phase:.3g} exceeds the oscillation "
            f"budget {OSCILLATION_BUDGET:.3g}; accuracy may be reduced",
            AccuracyWarning,
            stacklevel=3,
        )
        return True
    return False


@lru_cache(maxsize=65536)
def _scatter_complex(material, z, omega):
    k = omega / const.c
    K = 2.0 * k * z
    eps = complex(material.eps(omega))
    chi_k2 = (eps - 1.0) * k**2
    chi_dimless = chi_k2 * (2.0 * z) ** 2

    def propagating(t):
        kz = K * t
        r_s, r_p = _fresnel_kz(eps, chi_dimless, kz + 0j)
        ph = np.exp(1j * kz)
        fx = ph * (r_s - t * t * r_p)
        fz = 2.0 * ph * (1.0 - t * t) * r_p
        return np.vstack([fx, fz, 1j * kz * fx, 1j * kz * fz])

    def evanescent(u):
        r_s, r_p = _fresnel_kz(eps, chi_dimless, 1j * u)
        w = np.exp(-u)
        fx = w * (K * K * r_s + u * u * r_p)
        fz = 2.0 * w * (K * K + u * u) * r_p
        return np.vstack([fx, fz, -u * fx, -u * fz])

    # propagating sector: panels between zeros of cos(2 gamma z)
    n_osc = int(abs(K.real) / math.pi + 0.5)
    t_brk = [0.0] + [(j + 0.5) * math.pi / abs(K.real) for j in range(n_osc) if (j + 0.5) * math.pi < abs(K.real)] + [1.0]
    pv, perr = integrate(propagating, t_brk, epsrel=EPSREL, limit=max(4000, 8 * len(t_brk)))

    u_brk = [0.0, 1.0, 4.0, 16.0, 40.0, U_MAX]
    if eps.real < -1.0:
        # surface-plasmon pole of r_p close to the real kappa axis
        u_sp = (K / np.sqrt(-(eps + 1.0))).real
        if 0 < u_sp < U_MAX:
            u_brk.append(float(u_sp))
    u_chi = abs(np.sqrt(chi_dimless))
    if 0 < u_chi < U_MAX:
        u_brk.append(float(u_chi))
    ev, eerr = integrate(evanescent, sorted(set(u_brk)), epsrel=EPSREL)

    p_pref = 1j * k * _INV_8PI
    e_pref = _INV_8PI / (k * k * (2.0 * z) ** 3)
    xx, zz, dxx, dzz = p_pref * pv + e_pref * ev
    err = abs(p_pref) * perr + abs(e_pref) * eerr
    return GreenScatter(complex(xx), complex(zz), complex(dxx) / z, complex(dzz) / z, float(err))


def scatter_complex_frequency(g, omega):
    """Scattering Green tensor at a complex frequency near the positive real axis.

    Continues the real-axis wavevector representation: the propagating
    sector runs along gamma = (omega/c) t, t in [0, 1], the evanescent
    sector over real kappa. Reduces to :func:`scatter_real_axis` for
    real ``omega``.
    """
    omega = complex(omega)
    if not omega.real > 0:
        raise DomainError("frequency must have a positive real part")
    m = g.material
    if isinstance(m, Vacuum):
        return _ZERO
    _check_oscillation(omega, g.z)
    if isinstance(m, PerfectMirror):
        a = -1j * omega / const.c
        scale = 1.0 / (_C2 * a * a)
        return GreenScatter(*(scale * v for v in _mirror_xi2(a, g.z)))
    if omega.imag == 0:
        eps = complex(m.eps(omega))
        if eps.imag == 0 and eps.real < -1.0:
            omega = omega * (1.0 + 1j * LOSSLESS_SHIFT)
    return _scatter_complex(m, float(g.z), omega)


def scatter_real_axis(g, omega):
    """Scattering Green tensor G(z, z, omega) for real omega > 0 (complex values)."""
    if not omega > 0:
        raise DomainError("scatter_real_axis requires omega > 0")
    return scatter_complex_frequency(g, complex(omega))

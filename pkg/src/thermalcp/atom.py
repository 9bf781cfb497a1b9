"""Level structure of the atom or molecule and the quantities derived from it.

Transition frequencies are ``omega[n, k] = (E_n - E_k)/hbar``; a rate
``rates[n, k]`` is the probability per unit time of the jump n -> k.
"""
from dataclasses import dataclass

import numpy as np

from thermalcp import constants as const
from thermalcp.errors import DomainError, IterationError, PoleProximityError
from thermalcp.greens import imG_freespace, scatter_real_axis, xi2_scatter_imag_axis
from thermalcp.summation import frequency_sum
from thermalcp.thermal import photon_number

#: relative radius around polarizability poles inside which evaluation is refused
POLE_EXCLUSION = 1e-12


@dataclass(frozen=True, eq=False)
class LevelSystem:
    """Non-degenerate levels with electric-dipole matrix elements.

    Parameters
    ----------
    energies : array, shape (n,)
        Level energies in J, strictly ascending.
    dipoles : array, shape (n, n, 3)
        Matrix elements d_mn in C m; must be Hermitian. Diagonal entries
        are ignored.
    labels : sequence of str, optional
    isotropic : bool
        If set, only |d_mn|^2 enters and every tensor is |d|^2/3 times
        the identity.
    """

    energies: np.ndarray
    dipoles: np.ndarray
    labels: tuple = ()
    isotropic: bool = True

    def __post_init__(self):
        E = np.asarray(self.energies, dtype=float)
        d = np.asarray(self.dipoles, dtype=complex)
        n = E.size
        if n < 2:
            raise DomainError("a level system needs at least two levels")
        if d.shape != (n, n, 3):
            raise DomainError(f"dipoles must have shape ({n}, {n}, 3), got {d.shape}")
        if np.any(np.diff(E) <= 0):
            raise DomainError("energies must be strictly ascending (degenerate levels are not supported)")
        scale = np.max(np.abs(d)) if np.any(d) else 1.0
        if not np.allclose(d, np.conj(np.transpose(d, (1, 0, 2))), rtol=0, atol=1e-12 * scale):
            raise DomainError("dipole matrix must be Hermitian")
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(n))
        if len(labels) != n:
            raise DomainError("one label per level required")
        E.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "energies", E)
        object.__setattr__(self, "dipoles", d)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_transitions(cls, energies, transitions, labels=(), isotropic=True):
        """Build from a mapping ``{(m, n): d}`` with d a magnitude or 3-vector.

        A scalar magnitude is placed along x; in isotropic mode only its
        modulus matters.
        """
        n = len(energies)
        d = np.zeros((n, n, 3), dtype=complex)
        for (m, k), vec in transitions.items():
            if m == k:
                raise DomainError("transition needs two distinct levels")
            v = np.asarray(vec, dtype=complex)
            if v.ndim == 0:
                v = np.array([v, 0, 0], dtype=complex)
            d[m, k] = v
            d[k, m] = np.conj(v)
        return cls(np.asarray(energies, dtype=float), d, labels, isotropic)

    @classmethod
    def two_level(cls, omega10, dipole, isotropic=True):
        """Two-level system with transition frequency omega10 (rad/s)."""
        return cls.from_transitions([0.0, const.hbar * omega10], {(0, 1): dipole}, ("g", "e"), isotropic)

    @property
    def size(self):
        return self.energies.size

    @property
    def omega(self):
        """Bare transition frequencies omega[n, k] in rad/s."""
        return (self.energies[:, None] - self.energies[None, :]) / const.hbar

    @property
    def weights(self):
        """Diagonal Cartesian weights W[n, k, i] = d_nk,i d_kn,i (real)."""
        d2 = np.abs(self.dipoles) ** 2
        if self.isotropic:
            d2 = np.repeat(d2.sum(axis=2, keepdims=True) / 3.0, 3, axis=2)
        d2 = d2.copy()
        idx = np.arange(self.size)
        d2[idx, idx] = 0.0
        return d2


@dataclass(frozen=True, eq=False)
class DressedLevels:
    """Level energies, surface-induced shifts and transition rates.

    ``energies`` are the energies actually used downstream. In the
    default perturbative mode they equal the bare energies and
    ``shifts`` are reported only; after refinement they include
    ``hbar * shifts``.
    """

    energies: np.ndarray
    shifts: np.ndarray
    rates: np.ndarray
    refined: bool = False

    def __post_init__(self):
        E = np.asarray(self.energies, dtype=float)
        G = np.asarray(self.rates, dtype=float)
        if G.shape != (E.size, E.size):
            raise DomainError("rate matrix shape does not match the number of levels")
        if np.any(G < 0):
            raise DomainError("rates must be non-negative")
        if np.any(np.diag(G) != 0):
            raise DomainError("self-transition rates must vanish")
        object.__setattr__(self, "energies", E)
        object.__setattr__(self, "shifts", np.asarray(self.shifts, dtype=float))
        object.__setattr__(self, "rates", G)

    @classmethod
    def bare(cls, ls, rates=None):
        n = ls.size
        return cls(ls.energies, np.zeros(n), np.zeros((n, n)) if rates is None else rates)

    @property
    def omega(self):
        """Effective transition frequencies omega~[n, k]."""
        return (self.energies[:, None] - self.energies[None, :]) / const.hbar

    @property
    def totals(self):
        """Total loss rates Gamma_n = sum_k Gamma_nk."""
        return self.rates.sum(axis=1)

    @property
    def complex_frequencies(self):
        """Omega_nk = omega~_nk + i (Gamma_n + Gamma_k)/2."""
        g = self.totals
        return self.omega + 0.5j * (g[:, None] + g[None, :])


def _alpha_diag(ls, dressed, freq, damped=True, states=None):
    """Diagonal polarizability components, shape (n_states, 3, len(freq))."""
    freq = np.atleast_1d(np.asarray(freq, dtype=complex))
    W = ls.weights
    Om = dressed.complex_frequencies if damped else dressed.omega.astype(complex)
    Om = Om.copy()
    np.fill_diagonal(Om, 1.0)  # W vanishes on the diagonal
    if states is not None:
        W, Om = W[states], Om[states]
    om = Om[..., None]
    d1 = -om - freq
    d2 = -np.conj(om) + freq
    mask = W.sum(axis=2)[..., None] > 0
    scale = np.abs(om)
    if np.any(mask & ((np.abs(d1) < POLE_EXCLUSION * scale) | (np.abs(d2) < POLE_EXCLUSION * scale))):
        raise PoleProximityError("polarizability evaluated at a transition pole")
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(mask, 1.0 / d1 + 1.0 / d2, 0.0)
    return np.einsum("nki,nkl->nil", W, terms) / const.hbar


def polarizability(ls, dressed, n, omega, damped=True):
    """Polarizability of level ``n`` at (complex) frequency ``omega``.

    Returns a scalar in isotropic mode, otherwise the 3x3 tensor
    ``(1/hbar) sum_k [d_nk d_kn/(-Omega_nk - omega) + d_kn d_nk/(-Omega*_nk + omega)]``.
    With ``damped=False`` the linewidths are dropped (Omega -> omega~).
    ``dressed`` may be ``None`` for bare, undamped levels.
    """
    if dressed is None:
        dressed = DressedLevels.bare(ls)
    if ls.isotropic:
        return complex(_alpha_diag(ls, dressed, omega, damped, states=[n])[0, 0, 0])
    Om = dressed.complex_frequencies[n] if damped else dressed.omega[n].astype(complex)
    out = np.zeros((3, 3), dtype=complex)
    for k in range(ls.size):
        if k == n or not np.any(ls.dipoles[n, k]):
            continue
        d1, d2 = -Om[k] - omega, -np.conj(Om[k]) + omega
        if min(abs(d1), abs(d2)) < POLE_EXCLUSION * abs(Om[k]):
            raise PoleProximityError("polarizability evaluated at a transition pole")
        out += np.outer(ls.dipoles[n, k], ls.dipoles[k, n]) / d1
        out += np.outer(ls.dipoles[k, n], ls.dipoles[n, k]) / d2
    return out / const.hbar


def thermal_state(ls, dressed, T):
    """Boltzmann populations over the dressed energies."""
    if T < 0:
        raise DomainError("temperature must be non-negative")
    E = dressed.energies if dressed is not None else ls.energies
    p = np.zeros(E.size)
    if T == 0:
        p[np.argmin(E)] = 1.0
        return p
    x = (E - E.min()) / (const.k_B * T)
    w = np.exp(-x)
    return w / w.sum()


def thermal_polarizability(ls, dressed, T, omega, damped=True):
    """Population-weighted polarizability sum_n sigma_T,nn alpha_n(omega)."""
    if dressed is None:
        dressed = DressedLevels.bare(ls)
    p = thermal_state(ls, dressed, T)
    return sum(p[n] * polarizability(ls, dressed, n, omega, damped) for n in range(ls.size) if p[n] > 0)


# ---------------------------------------------------------------------------
# rates and shifts


def _occupation(omega, T):
    return photon_number(omega, T) if T > 0 else 0.0


def rates(ls, g, T, energies=None):
    """Transition rates Gamma[n, k] including thermal absorption and emission.

    Uses the full Im G: free-space part plus the surface scattering part
    evaluated at |omega~_nk|.
    """
    E = ls.energies if energies is None else np.asarray(energies, dtype=float)
    om = (E[:, None] - E[None, :]) / const.hbar
    W = ls.weights
    out = np.zeros((ls.size, ls.size))
    for n in range(ls.size):
        for k in range(n):
            w_ik = W[n, k]
            if not np.any(w_ik):
                continue
            w = om[n, k]
            if w <= 0:
                raise DomainError("level ordering changed during dressing")
            im_g = imG_freespace(w) + scatter_real_axis(g, w).imag().diagonal()
            coupling = 2.0 * const.mu_0 / const.hbar * w * w * float(np.dot(w_ik, im_g))
            nth = _occupation(w, T)
            out[n, k] = coupling * (nth + 1.0)  # emission
            out[k, n] = coupling * nth  # absorption
    return out


def _resonant_parts(ls, om, g, T, derivative):
    """Resonant sums R_em[n], R_ab[n] built from Re G(|omega~|).

    R_em[n] = sum_{k below n} w^2 (n(w)+1) W.ReG, R_ab[n] = -sum_{k above n} w^2 n(w) W.ReG;
    with ``derivative`` the coincident z-gradient of Re G is used.
    """
    W = ls.weights
    em = np.zeros(ls.size)
    ab = np.zeros(ls.size)
    for n in range(ls.size):
        for k in range(ls.size):
            if k == n or not np.any(W[n, k]):
                continue
            w = abs(om[n, k])
            G = scatter_real_axis(g, w).real()
            vec = G.gradient("coincident") if derivative else G.diagonal()
            val = w * w * float(np.dot(W[n, k], np.real(vec)))
            nth = _occupation(w, T)
            if om[n, k] > 0:
                em[n] += val * (nth + 1.0)
            else:
                ab[n] -= val * nth
    return em, ab


def _nonresonant_sums(ls, dressed, g, T, derivative, tol, n_max=None):
    """k_B T sum' xi^2 sum_i alpha_n,ii(i xi) [d/dz] G_ii(i xi) for every level n."""
    def term(xi):
        S = xi2_scatter_imag_axis(g, xi)
        if derivative:
            gvec = np.array([S.d_xx_dz, S.d_xx_dz, S.d_zz_dz]) * np.ones_like(xi)
        else:
            gvec = np.array([S.xx, S.xx, S.zz]) * np.ones_like(xi)
        alpha = _alpha_diag(ls, dressed, 1j * xi, damped=False).real
        return np.einsum("nil,il->nl", alpha, gvec)

    hints = tuple(abs(w) for w in np.unique(np.abs(dressed.omega[np.triu_indices(ls.size, 1)])))
    kwargs = {} if n_max is None else {"n_max": n_max}
    return frequency_sum(term, T, g.z, tol=tol, hints=hints, **kwargs)


def shifts(ls, g, T, energies=None, tol=1e-8):
    """Surface-induced level shifts delta omega_n in rad/s.

    Sum of a non-resonant Matsubara part and resonant parts at the
    transition frequencies. The position-independent free-space Lamb
    shift and thermal Stark shift are not included.
    """
    E = ls.energies if energies is None else np.asarray(energies, dtype=float)
    dressed = DressedLevels(E, np.zeros(ls.size), np.zeros((ls.size, ls.size)))
    nonres, _ = _nonresonant_sums(ls, dressed, g, T, derivative=False, tol=tol)
    em, ab = _resonant_parts(ls, dressed.omega, g, T, derivative=False)
    return const.mu_0 * (nonres - em - ab) / const.hbar


def dress(ls, g, T, refine=False, tol=1e-8, max_relative_change=1e-2):
    """Shifts and rates for level system ``ls`` at geometry ``g``.

    With ``refine`` one fixed-point pass is made: shifts are recomputed
    at the shifted transition frequencies, which are then used for the
    rates and everything downstream.
    """
    d1 = shifts(ls, g, T, tol=tol)
    if not refine:
        return DressedLevels(ls.energies, d1, rates(ls, g, T), refined=False)
    E1 = ls.energies + const.hbar * d1
    if np.any(np.diff(E1) <= 0):
        raise IterationError("shifts reorder the levels; refinement is not meaningful")
    d2 = shifts(ls, g, T, energies=E1, tol=tol)
    scale = max(np.max(np.abs(d1)), np.finfo(float).tiny)
    change = np.max(np.abs(d2 - d1)) / scale
    if change > max_relative_change:
        raise IterationError(f"shift refinement changed shifts by {change:.3g} (relative)")
    E2 = ls.energies + const.hbar * d2
    return DressedLevels(E2, d2, rates(ls, g, T, energies=E2), refined=True)

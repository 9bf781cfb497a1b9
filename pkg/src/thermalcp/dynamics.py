"""Internal-state relaxation under surface-modified transition rates."""
from dataclasses import dataclass
import math

import numpy as np
from scipy.linalg import expm
from scipy.sparse.csgraph import connected_components

from thermalcp.errors import DomainError, MultipleSteadyStatesError, RateModelError

#: relative tolerance on spurious imaginary/positive eigenvalues of the rate matrix
EIGEN_TOL = 1e-9
#: condition number above which the eigenbasis is abandoned for scipy's expm
COND_LIMIT = 1e8


@dataclass(frozen=True)
class InternalState:
    """Populations and coherence magnitudes of the internal levels at ``time`` (s)."""

    time: float
    populations: np.ndarray
    offdiag: np.ndarray = None

    def __post_init__(self):
        p = np.asarray(self.populations, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise DomainError("populations must be a non-empty vector")
        if np.any(p < -1e-12):
            raise DomainError("populations must be non-negative")
        if abs(math.fsum(p) - 1.0) > 1e-9:
            raise DomainError("populations must sum to one")
        object.__setattr__(self, "populations", np.clip(p, 0.0, None))
        if self.offdiag is not None:
            c = np.abs(np.asarray(self.offdiag))
            if c.shape != (p.size, p.size):
                raise DomainError("offdiag must be a square matrix matching the populations")
            c = c.copy()
            np.fill_diagonal(c, 0.0)
            object.__setattr__(self, "offdiag", c)

    @classmethod
    def pure(cls, size, level=0, time=0.0):
        p = np.zeros(size)
        p[level] = 1.0
        return cls(time, p)


def rate_matrix(rates):
    """Generator A with dp/dt = A p for transition rates ``rates[n, k]`` (n -> k)."""
    G = np.asarray(rates, dtype=float)
    A = G.T.copy()
    np.fill_diagonal(A, 0.0)
    A -= np.diag(G.sum(axis=1) - np.diag(G))
    return A


def _propagator(A):
    scale = max(np.max(np.abs(A)), np.finfo(float).tiny)
    lam, V = np.linalg.eig(A)
    if np.any(np.abs(lam.imag) > EIGEN_TOL * scale) or np.any(lam.real > EIGEN_TOL * scale):
        raise RateModelError(f"rate matrix has eigenvalues {lam} that do not describe pure relaxation")
    lam = np.minimum(lam.real, 0.0)
    V = V.real
    if np.linalg.cond(V) > COND_LIMIT:
        return lambda dt: expm(A * dt)
    Vinv = np.linalg.inv(V)
    return lambda dt: (V * np.exp(lam * dt)) @ Vinv


def evolve(initial, dressed, t_grid):
    """Propagate populations and coherence magnitudes to each time in ``t_grid``.

    Populations follow the rate equations through the matrix exponential
    of the rate matrix; coherence magnitudes decay with the mean of the
    two total loss rates.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise DomainError("t_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(t) < 0) or t[0] < initial.time:
        raise DomainError("t_grid must be ascending and start no earlier than the initial state")
    if dressed.rates.shape[0] != initial.populations.size:
        raise DomainError("state size does not match the level system")
    A = rate_matrix(dressed.rates)
    prop = _propagator(A)
    totals = dressed.totals
    decay = 0.5 * (totals[:, None] + totals[None, :])
    out = []
    for ti in t:
        dt = ti - initial.time
        if dt == 0:
            p = initial.populations.copy()
        else:
            p = np.clip(prop(dt) @ initial.populations, 0.0, None)
            p /= math.fsum(p)
        c = None
        if initial.offdiag is not None:
            c = initial.offdiag * np.exp(-decay * dt)
        out.append(InternalState(float(ti), p, c))
    return out


def steady_state(dressed):
    """Normalized null vector of the rate matrix.

    Raises
    ------
    MultipleSteadyStatesError
        If the graph of nonzero rates has several components.
    """
    G = dressed.rates
    n = G.shape[0]
    if n == 1:
        return np.ones(1)
    n_comp, labels = connected_components(G > 0, directed=True, connection="weak")
    if n_comp > 1:
        comps = tuple(tuple(int(i) for i in np.flatnonzero(labels == c)) for c in range(n_comp))
        raise MultipleSteadyStatesError(f"level graph splits into components {comps}", comps)
    A = rate_matrix(G)
    # row-scale for stiff rate sets, then border with the normalization row
    row = np.max(np.abs(A), axis=1)
    row[row == 0] = 1.0
    M = np.vstack([A / row[:, None], np.ones(n)])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    p, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    p = np.clip(p, 0.0, None)
    return p / math.fsum(p)

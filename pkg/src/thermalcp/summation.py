"""Matsubara sums and their zero-temperature integral counterpart.

``k_B T sum'_N f(xi_N)`` (half weight on N = 0) turns into
``hbar/(2 pi) int_0^inf f(xi) dxi`` as T -> 0. Both are exposed with the
same calling convention so callers can switch on T alone.
"""
import math

import numpy as np

from thermalcp import constants as const
from thermalcp.errors import ConvergenceError
from thermalcp.quadrature import integrate
from thermalcp.thermal import matsubara_frequency

N_MAX = 100_000
CONFIRMATIONS = 3


def _as_2d(values):
    values = np.asarray(values)
    return values[None, :] if values.ndim == 1 else values


def matsubara_sum(term, T, tol=1e-8, n_max=N_MAX):
    """Return ``(k_B T sum'_N term(xi_N), n_terms)``.

    ``term`` maps an array of Matsubara frequencies to an array of shape
    ``(m, len)`` (or ``(len,)``). Summation stops once ``CONFIRMATIONS``
    consecutive terms are each below ``tol`` times the running sum in
    every component. The stopping index is found by a sequential scan,
    and the kept terms are added with ``math.fsum`` in ascending N, so
    the result does not depend on how terms were batched.
    """
    block = 8
    start = 0
    kept = []
    running = None
    quiet = 0
    while start < n_max:
        stop = min(start + block, n_max)
        N = np.arange(start, stop)
        vals = _as_2d(term(matsubara_frequency(N, T)))
        vals = vals.astype(float, copy=True)
        if start == 0:
            vals[:, 0] *= 0.5
            running = np.zeros(vals.shape[0])
        for j in range(vals.shape[1]):
            col = vals[:, j]
            kept.append(col)
            running = running + col
            if np.all(np.abs(col) <= tol * np.abs(running)):
                quiet += 1
                if quiet >= CONFIRMATIONS:
                    return _finish(kept, T), len(kept)
            else:
                quiet = 0
        start = stop
        block = min(2 * block, 1024)
    raise ConvergenceError(
        f"Matsubara sum not converged to rel. {tol:g} within {n_max} terms",
        partial=_finish(kept, T),
        n_terms=len(kept),
    )


def _finish(kept, T):
    arr = np.array(kept)
    total = np.array([math.fsum(arr[:, i]) for i in range(arr.shape[1])])
    return const.k_B * T * total


def zero_temperature_integral(term, z, tol=1e-8, hints=()):
    """Return ``(hbar/(2 pi) int_0^inf term(xi) dxi, error)``.

    Integration runs over ln(xi) from 1e-12 to 80 times c/(2z), the
    scale on which the surface response decays; ``hints`` are extra
    frequencies (e.g. transition frequencies) used as panel breakpoints.
    """
    xi_ref = const.c / (2.0 * z)
    lo, hi = math.log(1e-12 * xi_ref), math.log(80.0 * xi_ref)
    brk = {lo, hi, math.log(xi_ref)}
    for h in hints:
        if h > 0 and lo < math.log(h) < hi:
            brk.add(math.log(h))

    def integrand(s):
        xi = np.exp(s)
        return _as_2d(term(xi)) * xi

    value, err = integrate(integrand, sorted(brk), epsrel=tol)
    scale = const.hbar / (2.0 * math.pi)
    return scale * np.real(value), scale * err


def frequency_sum(term, T, z, tol=1e-8, n_max=N_MAX, hints=()):
    """Matsubara sum for T > 0, zero-temperature integral for T = 0.

    Returns ``(values, n_terms)``; ``n_terms`` is 0 on the integral path.
    """
    if T > 0:
        return matsubara_sum(term, T, tol=tol, n_max=n_max)
    value, _ = zero_temperature_integral(term, z, tol=tol, hints=hints)
    return value, 0

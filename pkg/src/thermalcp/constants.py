"""Physical constants (CODATA 2018, SI).

Every module reads constants from here so that derived numbers stay
consistent with each other.
"""
import math

hbar = 1.054571817e-34  # J s
k_B = 1.380649e-23  # J / K
c = 299792458.0  # m / s
mu_0 = 1.25663706212e-6  # N / A^2
epsilon_0 = 8.8541878128e-12  # F / m
e = 1.602176634e-19  # C

# unit conversions used by the CLI only
eV_to_rad_per_s = e / hbar
debye = 1e-21 / c  # C m
bohr_radius = 5.29177210903e-11  # m
ea0 = e * bohr_radius  # C m

# exponent above which exp(-x) is treated as zero in thermal factors
EXP_CUTOFF = 700.0

TWO_PI = 2.0 * math.pi

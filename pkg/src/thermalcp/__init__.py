"""Thermal Casimir-Polder forces on atoms and molecules above a planar surface."""

from thermalcp.thermal import (
    photon_number,
    photon_number_complex,
    matsubara_frequency,
    thermal_reduction_ratio,
    one_minus_thermal_reduction_ratio,
)
from thermalcp.materials import (
    Drude,
    DrudeLorentz,
    Plasma,
    PerfectMirror,
    Vacuum,
    eps_imag_axis,
    eps_real_axis,
)
from thermalcp.greens import (
    GreenScatter,
    PlanarGeometry,
    fresnel,
    imG_freespace,
    scatter_complex_frequency,
    scatter_imag_axis,
    scatter_real_axis,
    xi2_scatter_imag_axis,
)
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
from thermalcp.dynamics import InternalState, evolve, steady_state
from thermalcp.force import (
    ForceBreakdown,
    dilute_gas_check,
    force_macroscopic,
    force_state_exact,
    force_state_perturbative,
    force_states_perturbative,
    force_total,
    force_zero_temperature,
    imag_axis_polarizability,
    plate_pressure,
    thermal_imag_axis_polarizability,
)

__version__ = "0.1.0"

"""Two-body scattering and bound states of Rydberg slow-light polaritons."""
from .params import (DerivedScales, RegimeLabel, SystemParams, classify_regime, derive_scales,
                     load_config, params_for_strength, validate_interaction)
from .potential import ReducedPotential, reduce, v_bare, v_eff, v_eff_fourier
from .regimes import (chibar_full, coeffs_adiabatic, coeffs_far_detuned, coeffs_low_energy,
                      efield_ratio)
from .polariton_modes import chi_exact, fit_three_term, single_particle_modes, zeta_exact
from .schroedinger import (bound_states_frozen, continued_a1d_weak, phase_shift,
                           scan_scattering_length, scattering_length, self_consistent_spectrum)

__version__ = "0.1.0"

__all__ = [
    "DerivedScales", "RegimeLabel", "SystemParams", "classify_regime", "derive_scales", "load_config",
    "params_for_strength", "validate_interaction",
    "ReducedPotential", "reduce", "v_bare", "v_eff", "v_eff_fourier",
    "chibar_full", "coeffs_adiabatic", "coeffs_far_detuned", "coeffs_low_energy", "efield_ratio",
    "chi_exact", "fit_three_term", "single_particle_modes", "zeta_exact",
    "bound_states_frozen", "continued_a1d_weak", "phase_shift", "scan_scattering_length",
    "scattering_length", "self_consistent_spectrum",
]

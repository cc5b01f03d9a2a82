"""Linear water waves over shear currents: pressure transfer and inversion.

The package computes the vertical structure and dispersion of
small-amplitude waves riding prescribed background shear currents (with
optional density stratification or a second fluid layer), evaluates the
pressure transfer function that links surface elevation to dynamic
pressure at depth, and inverts bottom-gauge pressure records back to
surface elevation spectrally or hydrostatically.
"""

from .errors import (ConsistencyError, ConvergenceError, CriticalLayerError,
                     DegenerateModeError, DomainError, FormatError,
                     IllConditionedError, IntegrabilityError, NoRootError,
                     SideAmbiguityError, VacuumLayerError, WaveTransError)
from .profiles import (GRAVITY, DensityProfile, Environment, ShearProfile,
                       environment_hash)
from .rayleigh import (ModeSolution, bifurcation_residual, shoot, solve_mode)
from .dispersion import (DispersionCurve, DispersionResult, burns_speed,
                         closed_form_c_const_vorticity, closed_form_c_zero,
                         find_wave_speed, generalized_burns_speed,
                         stagnation_condition, stagnation_threshold, sweep,
                         two_fluid_dispersion)
from .twofluid import (TwoFluidEnv, interface_hydrostatic, interface_shot,
                       solve_two_layer_modes)
from .transfer import (FieldGrid, TransferFunction, bed_gain, bed_transfer,
                       linear_field, nonmonotonicity_profile,
                       transfer_constant_vorticity, transfer_from_mode,
                       transfer_from_two_layer_modes, transfer_zero_vorticity)
from .reconstruct import (GaugeRecord, ModeGain, ReconstructOptions,
                          ReconstructionResult, preprocess, read_gauge_csv,
                          reconstruct_hydrostatic, reconstruct_spectral,
                          synthesize_record, write_gauge_csv)

__version__ = "0.1.0"

__all__ = [
    "GRAVITY",
    "ShearProfile", "DensityProfile", "Environment", "environment_hash",
    "ModeSolution", "shoot", "bifurcation_residual", "solve_mode",
    "DispersionResult", "DispersionCurve", "find_wave_speed", "sweep",
    "closed_form_c_zero", "closed_form_c_const_vorticity",
    "stagnation_condition", "stagnation_threshold",
    "burns_speed", "generalized_burns_speed", "two_fluid_dispersion",
    "TwoFluidEnv", "solve_two_layer_modes", "interface_shot",
    "interface_hydrostatic",
    "TransferFunction", "FieldGrid", "transfer_from_mode",
    "transfer_from_two_layer_modes", "bed_transfer", "bed_gain",
    "nonmonotonicity_profile", "transfer_zero_vorticity",
    "transfer_constant_vorticity", "linear_field",
    "GaugeRecord", "ModeGain", "ReconstructOptions", "ReconstructionResult",
    "preprocess", "reconstruct_hydrostatic", "reconstruct_spectral",
    "synthesize_record", "read_gauge_csv", "write_gauge_csv",
    "WaveTransError", "DomainError", "SideAmbiguityError",
    "CriticalLayerError", "DegenerateModeError", "VacuumLayerError",
    "ConvergenceError", "NoRootError", "IntegrabilityError",
    "IllConditionedError", "ConsistencyError", "FormatError",
]

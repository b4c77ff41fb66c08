"""Linear stability of stratified Couette flow: closed-form mode evolution and checks."""
from .boussinesq import ModeIndex, RegimeParams, evolve_mode, evolve_mode_homogeneous
from .dispersive import DispersionParams, evolve_no_shear_mode
from .euler import EulerModeParams, evolve_euler_mode
from .errors import StratoError
from .field import GridSpec, Model, evolve_field, ingest_initial_data, norm

__all__ = [
    "DispersionParams", "EulerModeParams", "GridSpec", "Model", "ModeIndex", "RegimeParams",
    "StratoError", "evolve_euler_mode", "evolve_field", "evolve_mode", "evolve_mode_homogeneous",
    "evolve_no_shear_mode", "ingest_initial_data", "norm",
]

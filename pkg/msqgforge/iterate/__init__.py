# iterate/__init__.py

from .state import IterationState, NoiseContext, base_step, compose_iterate, y_radius, stress_radius
from .cutoffs import CutoffFamily, chi, cutoff_family
from .energy import GapSeries, energy_gap, gap_formula
from .amplitudes import AmplitudeField, amplitude, rho
from .perturbation import Perturbation, SliceInput, build_perturbation, wave_radius
from .inductive import InductiveReport, InductiveRow, check_inductive, energy_defect, hs_split, material_derivative
from .stage import StageBuilder, StageResult, StageWindows, stage_windows, time_step, flow_grid_size

__all__ = [
    "IterationState",
    "NoiseContext",
    "base_step",
    "compose_iterate",
    "y_radius",
    "stress_radius",
    "CutoffFamily",
    "chi",
    "cutoff_family",
    "GapSeries",
    "energy_gap",
    "gap_formula",
    "AmplitudeField",
    "amplitude",
    "rho",
    "Perturbation",
    "SliceInput",
    "build_perturbation",
    "wave_radius",
    "InductiveReport",
    "InductiveRow",
    "check_inductive",
    "energy_defect",
    "hs_split",
    "material_derivative",
    "StageBuilder",
    "StageResult",
    "StageWindows",
    "stage_windows",
    "time_step",
    "flow_grid_size",
]

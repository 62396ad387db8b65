# spectral/__init__.py

from .grid import PeriodicGrid
from .fields import Field, ScalarField, VectorField, SymTFField, FieldSeries, ScalarPath
from .operators import (
    frac_laplacian,
    leray_project,
    inverse_divergence,
    band_project,
    annulus_project,
    sqg_nonlinearity,
    sqg_nonlinearity_expanded,
    div,
    div_tensor,
    grad,
    curl_perp,
    perp,
    mean_free,
    advect,
    grad_transpose,
    perp_curl,
    dot,
    scalar_times,
    pressure_poisson,
    check_solenoidal,
    spectral_mass_outside,
)
from .norms import norm_sup, norm_hs, norm_hs_sq, norm_c1, holder_time, holder_running, series_hs_sq, series_sup
from .constants import MeasuredConstants, measure_constants

__all__ = [
    "PeriodicGrid",
    "Field",
    "ScalarField",
    "VectorField",
    "SymTFField",
    "FieldSeries",
    "ScalarPath",
    "frac_laplacian",
    "leray_project",
    "inverse_divergence",
    "band_project",
    "annulus_project",
    "sqg_nonlinearity",
    "sqg_nonlinearity_expanded",
    "div",
    "div_tensor",
    "grad",
    "curl_perp",
    "perp",
    "mean_free",
    "advect",
    "grad_transpose",
    "perp_curl",
    "dot",
    "scalar_times",
    "pressure_poisson",
    "check_solenoidal",
    "spectral_mass_outside",
    "norm_sup",
    "norm_hs",
    "norm_hs_sq",
    "norm_c1",
    "holder_time",
    "holder_running",
    "series_hs_sq",
    "series_sup",
    "MeasuredConstants",
    "measure_constants",
]

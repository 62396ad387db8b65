# iterate/amplitudes.py

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from ..errors import OutsideBall
from ..geometry import DirectionSystem, Parity, ball_distance, gamma_coeffs
from ..spectral.fields import SymTFField
from ..spectral.grid import PeriodicGrid
from ..spectral.interp import resample
from ..spectral.norms import norm_sup


def fine_sup(R: SymTFField, factor: int = 2) -> float:
    """Sup of R̊ on a grid 'factor' times finer than its own."""
    fine = PeriodicGrid(R.grid.N * factor, R.grid.workers)
    return norm_sup(SymTFField(fine, resample(R.coeffs, R.grid, fine)))


def rho(R_anchor: SymTFField, gamma_l: float, ell: float, eps_gamma: float) -> float:
    """ρ_j = ε_γ^{−1}√(l² + ‖R̊_{q,j}(τj)‖²) + γ_l(τj)."""
    size = fine_sup(R_anchor)
    return math.sqrt(ell ** 2 + size ** 2) / eps_gamma + gamma_l


@dataclass
class AmplitudeField:
    """a_{k,j} at one time on the physical grid, keyed by direction."""
    values: Dict[Tuple[float, float], np.ndarray]
    distance: float
    scaled: bool


def amplitude(R_values: np.ndarray, rho_j: float, lam: float, geo: DirectionSystem, parity: Parity,
              slack: float = 0.0, upsilon_l: Optional[float] = None) -> AmplitudeField:
    """
    a_{k,j} = λ^{−1/2}ρ_j^{1/2}γ_k(Id − R̊_{q,j}/ρ_j), times Υ_l^{−1/2} in multiplicative mode.

    Args:
        R_values: Physical (R¹¹, R¹²) samples of the transported stress.
        slack: Relative overshoot of the ball radius that is pulled back onto
            the ball boundary and flagged instead of raising.

    Raises:
        OutsideBall: If ‖R̊_{q,j}/ρ_j‖ exceeds ε_γ(1 + slack).
    """
    a11 = R_values[0] / rho_j
    a12 = R_values[1] / rho_j
    distance = ball_distance(1 - a11, -a12, 1 + a11)
    eps = geo.eps_gamma
    if distance > eps * (1 + slack):
        raise OutsideBall(f"‖R̊/ρ‖ = {distance:.6f} exceeds ε_γ = {eps:.6f}")
    scaled = distance > eps
    if scaled:
        a11, a12 = a11 * eps / distance, a12 * eps / distance
    gammas = gamma_coeffs(geo, parity, (1 - a11, -a12, 1 + a11), slack=1e-12)
    scale = math.sqrt(rho_j / lam)
    if upsilon_l is not None:
        scale /= math.sqrt(upsilon_l)
    return AmplitudeField(values={k: scale * g for k, g in gammas.items()}, distance=distance, scaled=scaled)

# iterate/energy.py

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..params import Mode
from ..spectral.fields import ScalarPath
from .state import IterationState

TWO_PI_SQ = (2 * np.pi) ** 2


def gap_formula(e, norm_sq, lam_delta: float, upsilon=1.0, upsilon_l=1.0):
    """
    Υ^{−2}Υ_l/(4(2π)²) · [e(1 − λ_{q+2}δ_{q+2}) − Υ²‖y‖²].

    With Υ = Υ_l = 1 and norm_sq = ‖y + z‖² this is the additive gap.
    """
    upsilon = np.asarray(upsilon, dtype=float)
    return upsilon ** -2 * upsilon_l / (4 * TWO_PI_SQ) * (np.asarray(e) * (1 - lam_delta) - upsilon ** 2 * np.asarray(norm_sq))


@dataclass
class GapSeries:
    """Energy gap γ_q (or γ̄_q) on stage-q samples, clipped at 0."""
    path: ScalarPath
    raw_min: float
    clipped: int

    def to_dict(self) -> dict:
        return {"k_start": self.path.k0, "k_stop": self.path.k1, "raw_min": self.raw_min,
                "clipped": self.clipped, "anchor": "energy.gap"}


def energy_gap(state: IterationState, profile, k_start: int, k_stop: int,
               upsilon_l: Optional[ScalarPath] = None, logger=None) -> GapSeries:
    """
    γ_q(t_k) for k in [k_start, k_stop).

    Negative values are set to 0 and counted; they can only appear when the
    energy sandwich of stage q fails.
    """
    sched = state.schedule
    lam_delta = sched.lam_delta(state.q + 2)
    times = (k_start + np.arange(k_stop - k_start)) * state.dt
    e = profile.value(times)
    y = state.y.window(k_start, k_stop)
    if len(y) != k_stop - k_start:
        raise IndexError(f"stage {state.q} has samples [{state.k_start}, {state.k_stop}), gap needs [{k_start}, {k_stop})")
    if state.mode is Mode.ADDITIVE:
        gap = gap_formula(e, state.solution_energy(k_start, k_stop), lam_delta)
    else:
        upsilon = state.noise.upsilon_values(k_start, k_stop)
        if upsilon_l is None:
            mollified = upsilon
        else:
            mollified = upsilon_l.values[k_start - upsilon_l.k0:k_stop - upsilon_l.k0]
        norm_sq = state.solution_energy(k_start, k_stop) / upsilon ** 2
        gap = gap_formula(e, norm_sq, lam_delta, upsilon, mollified)
    raw_min = float(gap.min()) if gap.size else 0.0
    negative = gap < 0
    clipped = int(np.count_nonzero(negative))
    if clipped and logger:
        logger.warning(f"Energy gap of stage {state.q} clipped at {clipped} samples (min {raw_min:.4g})")
    return GapSeries(path=ScalarPath(k_start, state.dt, np.where(negative, 0.0, gap)), raw_min=raw_min, clipped=clipped)

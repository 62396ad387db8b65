# noise/stopping.py

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from ..params import ParamSchedule, m_L
from ..spectral.fields import ScalarPath
from ..spectral.norms import holder_running
from .stokes import ZProcess

TWO_PI_SQ = (2 * np.pi) ** 2


@dataclass
class StoppingTime:
    """
    First-crossing stopping time on the sample grid.

    Attributes:
        value: The stopping time itself (the cap when nothing crosses).
        trigger: Name of the condition that fired first, or "cap".
        crossings: First crossing time per condition, None if it never crossed.
        extras: Thresholds and derived constants reported with the value.
    """
    value: float
    trigger: str
    dt: float
    crossings: Dict[str, Optional[float]] = field(default_factory=dict)
    extras: Dict[str, float] = field(default_factory=dict)
    anchor: str = ""

    @property
    def k_stop(self) -> int:
        """Last grid index with t_k <= value."""
        return int(math.floor(self.value / self.dt + 1e-9))

    def to_dict(self) -> dict:
        return {"value": self.value, "trigger": self.trigger, "crossings": dict(self.crossings),
                "extras": dict(self.extras), "anchor": self.anchor}


def first_crossing(hits: np.ndarray, dt: float, k0: int = 0) -> Optional[float]:
    idx = np.flatnonzero(hits)
    if idx.size == 0:
        return None
    return float((k0 + idx[0]) * dt)


def _resolve(crossings: Dict[str, Optional[float]], cap: float):
    value, trigger = cap, "cap"
    for name, t in crossings.items():
        if t is not None and t < value:
            value, trigger = t, name
    return value, trigger


def additive_threshold(sched: ParamSchedule, C_S: float, eps_gamma: float, e_low: float) -> float:
    """ε_γ/(C_S·32(2π)²) · a^{(1−2β)b(b−1)} · ŭ."""
    log_factor = (1 - 2 * sched.beta) * sched.b * (sched.b - 1) * math.log(sched.a)
    return eps_gamma / (C_S * 32 * TWO_PI_SQ) * math.exp(log_factor) * e_low


def stopping_time_additive(z: ZProcess, sched: ParamSchedule, C_S: float, C_0: float, delta: float,
                           eps_gamma: float, e_low: float, cap: float = 1.0, logger=None) -> StoppingTime:
    """
    𝔱 = cap ∧ first time any of the three additive thresholds is reached.

    The conditions are C_S‖z‖_{Ḣ^{5/2+2σ}} >= 1, C_S times the running
    C_t^{1/2−2δ}Ḣ^{7/4+4σ} norm >= 1, and
    C_0(C_S‖z‖²_{Ḣ^{3/2+σ/2}} + 2‖z‖²_{Ḣ^{3/2−σ}}) >= the energy threshold.
    Sample k only reads z on [0, t_k].
    """
    sigma = sched.sigma
    k_cap = min(z.steps, int(math.floor(cap / z.dt + 1e-9)))
    k_stop = k_cap + 1
    sobolev = C_S * z.hs_norm(2.5 + 2 * sigma, 0, k_stop)
    coeffs = z.coefficients(0, k_stop)
    holder = C_S * holder_running(coeffs, z.dt, 0.5 - 2 * delta, norm=z.mode_norm(1.75 + 4 * sigma))
    energy = C_0 * (C_S * z.hs_norm(1.5 + sigma / 2, 0, k_stop) ** 2 + 2 * z.hs_norm(1.5 - sigma, 0, k_stop) ** 2)
    threshold = additive_threshold(sched, C_S, eps_gamma, e_low)
    crossings = {
        "sobolev": first_crossing(sobolev >= 1.0, z.dt),
        "holder": first_crossing(holder >= 1.0, z.dt),
        "energy": first_crossing(energy >= threshold, z.dt),
    }
    value, trigger = _resolve(crossings, cap)
    result = StoppingTime(value=value, trigger=trigger, dt=z.dt, crossings=crossings,
                          extras={"energy_threshold": threshold, "C_S": C_S, "C_0": C_0, "delta": delta},
                          anchor="stopping.additive")
    if logger:
        logger.info(f"Additive stopping time {value:.6g} (trigger: {trigger})")
    return result


def stopping_time_mult(B: ScalarPath, L: float, delta: float, logger=None) -> StoppingTime:
    """
    T_L = L ∧ inf{|B| >= L^{1/4}} ∧ inf{‖B‖_{C^{1/2−2δ}} >= L^{1/2}}, with m_L reported.
    """
    start = max(0, -B.k0)
    k_cap = int(math.floor(L / B.dt + 1e-9))
    values = B.values[start:min(len(B), k_cap + 1 - B.k0)]
    k0 = B.k0 + start
    holder = holder_running(values, B.dt, 0.5 - 2 * delta)
    crossings = {
        "sup": first_crossing(np.abs(values) >= L ** 0.25, B.dt, k0),
        "holder": first_crossing(holder >= L ** 0.5, B.dt, k0),
    }
    value, trigger = _resolve(crossings, float(L))
    result = StoppingTime(value=value, trigger=trigger, dt=B.dt, crossings=crossings,
                          extras={"m_L": m_L(L), "L": float(L), "delta": delta},
                          anchor="stopping.multiplicative")
    if logger:
        logger.info(f"Multiplicative stopping time {value:.6g} (trigger: {trigger}, m_L={m_L(L):.4f})")
    return result

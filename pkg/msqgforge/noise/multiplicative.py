# noise/multiplicative.py

import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from ..mollify import lag_weights, mollify_time
from ..params import m_L
from ..spectral.fields import ScalarPath
from ..spectral.norms import holder_running
from .wiener import NoiseRealization


def brownian_path(noise: NoiseRealization, steps: Optional[int] = None) -> ScalarPath:
    """B(t_k) = amplitude · Σ_{i<k} √dt n_i on k = 0..steps with B(0) = 0."""
    steps = noise.steps if steps is None else min(steps, noise.steps)
    values = np.zeros(steps + 1)
    values[1:] = noise.amplitude * np.sqrt(noise.dt) * np.cumsum(noise.scalar[:steps])
    return ScalarPath(0, noise.dt, values)


def extend_path(path: ScalarPath, k_start: int) -> ScalarPath:
    """Extend a path starting at k0 >= k_start back to k_start by its value at k0."""
    if k_start >= path.k0:
        return path
    pad = np.full(path.k0 - k_start, path.values[0])
    return ScalarPath(k_start, path.dt, np.concatenate([pad, path.values]))


@dataclass
class UpsilonPaths:
    """Υ = e^B, Υ^{−1} and the one-sided mollification Υ_l on a window."""
    upsilon: ScalarPath
    inverse: ScalarPath
    mollified: ScalarPath
    width: float


def upsilon_paths(B: ScalarPath, width: float, k_start: int, k_stop: int) -> UpsilonPaths:
    """
    Build Υ, Υ^{−1} and Υ_l with Υ_l defined on [k_start, k_stop).

    B is extended to negative times by B(0) = 0 so the mollifier always has
    the history it needs.
    """
    lags, _ = lag_weights(width, B.dt)
    B_ext = extend_path(B, k_start - int(lags.max()))
    k_hi = min(k_stop, B_ext.k1)
    upsilon = ScalarPath(B_ext.k0, B.dt, np.exp(B_ext.values[:k_hi - B_ext.k0]))
    inverse = ScalarPath(B_ext.k0, B.dt, np.exp(-B_ext.values[:k_hi - B_ext.k0]))
    mollified = mollify_time(upsilon, width, k_start, k_hi)
    return UpsilonPaths(upsilon=upsilon, inverse=inverse, mollified=mollified, width=width)


def upsilon_bounds(paths: UpsilonPaths, L: float, k_stop: int, delta: float) -> Dict[str, dict]:
    """
    Pathwise checks of |Υ|, |Υ^{−1}| <= e^{L^{1/4}}, ‖Υ_l^{−1/2}‖ <= e^{L^{1/4}/2} and
    ‖Υ^{±1}‖_{C^{1/2−2δ}} <= m_L² on samples up to k_stop.
    """
    r = L ** 0.25
    exponent = 0.5 - 2 * delta
    mL2 = m_L(L) ** 2

    def up_to(path: ScalarPath) -> np.ndarray:
        start = max(0, 0 - path.k0)
        return path.values[start:max(start, k_stop + 1 - path.k0)]

    ups, inv, mol = up_to(paths.upsilon), up_to(paths.inverse), up_to(paths.mollified)
    checks = {}

    def add(name, value, bound, anchor):
        checks[name] = {"value": float(value), "bound": float(bound), "holds": bool(value <= bound), "anchor": anchor}

    add("upsilon_sup", np.max(np.abs(ups)) if ups.size else 0.0, math.exp(r), "upsilon.sup")
    add("upsilon_inverse_sup", np.max(np.abs(inv)) if inv.size else 0.0, math.exp(r), "upsilon.inverse_sup")
    add("upsilon_mollified_root", np.max(mol ** -0.5) if mol.size else 0.0, math.exp(r / 2), "upsilon.mollified_root")
    holder = holder_running(ups, paths.upsilon.dt, exponent)[-1] if ups.size else 0.0
    holder_inv = holder_running(inv, paths.inverse.dt, exponent)[-1] if inv.size else 0.0
    add("upsilon_holder", holder, mL2, "upsilon.holder")
    add("upsilon_inverse_holder", holder_inv, mL2, "upsilon.inverse_holder")
    return checks

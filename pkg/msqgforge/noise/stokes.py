# noise/stokes.py

from typing import Optional

import numpy as np

from ..spectral.fields import FieldSeries, VectorField
from ..spectral.grid import PeriodicGrid
from .wiener import NoiseRealization, TWO_PI_SQ


def ou_rate(modes: np.ndarray, sigma: float) -> np.ndarray:
    """Damping rate μ_m = |m|^{3/2−2σ}."""
    return np.hypot(modes[:, 0], modes[:, 1]) ** (1.5 - 2 * sigma)


def ou_variance(g, mu, t):
    """E|c_m(t)|² = g²(1 − e^{−2μt})/(2μ) for an OU mode started at 0."""
    g, mu, t = np.asarray(g, dtype=float), np.asarray(mu, dtype=float), np.asarray(t, dtype=float)
    return g ** 2 * (-np.expm1(-2 * mu * t)) / (2 * mu)


def simulate_ou_modes(g: np.ndarray, mu: np.ndarray, dt: float, xi: np.ndarray) -> np.ndarray:
    """
    Exact-in-distribution OU update c_{k+1} = e^{−μdt} c_k + g √((1 − e^{−2μdt})/(2μ)) ξ_k from c_0 = 0.

    Returns:
        Coefficients of shape (steps + 1, M).
    """
    decay = np.exp(-mu * dt)
    scale = g * np.sqrt(ou_variance(1.0, mu, dt))
    steps = xi.shape[0]
    c = np.zeros((steps + 1,) + xi.shape[1:], dtype=complex)
    for k in range(steps):
        c[k + 1] = decay * c[k] + scale * xi[k]
    return c


class ZProcess:
    """
    Divergence-free field z(t) = Σ_m c_m(t) m^⊥/|m| e^{im·x} + c.c. on t_k = k·dt.

    Only half-plane modes are stored; ẑ(−m) is the conjugate. z ≡ 0 for t <= 0.
    """

    def __init__(self, grid: PeriodicGrid, dt: float, modes: np.ndarray, coeffs: np.ndarray, cutoff: Optional[float] = None):
        self.grid = grid
        self.dt = float(dt)
        self.modes = modes
        self.coeffs = coeffs
        self.cutoff = cutoff
        self.modulus = np.hypot(modes[:, 0], modes[:, 1]) if len(modes) else np.zeros(0)

    @property
    def steps(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def radius(self) -> int:
        """Box radius holding every stored mode."""
        if not len(self.modes):
            return 0
        return int(np.max(np.abs(self.modes)))

    def coefficients(self, k_start: int, k_stop: int) -> np.ndarray:
        """Mode coefficients for k in [k_start, k_stop); zero before t = 0."""
        if k_stop > self.steps + 1:
            raise IndexError(f"z is sampled up to k={self.steps}, requested up to {k_stop - 1}")
        out = np.zeros((k_stop - k_start, len(self.modes)), dtype=complex)
        lo, hi = max(k_start, 0), k_stop
        if hi > lo:
            out[lo - k_start:hi - k_start] = self.coeffs[lo:hi]
        return out

    def series(self, k_start: int, k_stop: int, radius: Optional[int] = None) -> FieldSeries:
        """z on [k_start, k_stop) as a compact VectorField series."""
        radius = self.radius if radius is None else int(radius)
        series = FieldSeries.zeros(VectorField, self.grid, k_start, k_stop - k_start, self.dt, radius)
        if not len(self.modes):
            return series
        r = series.radius
        inside = np.max(np.abs(self.modes), axis=1) <= r
        modes = self.modes[inside]
        c = self.coefficients(k_start, k_stop)[:, inside]
        unit = np.stack([-modes[:, 1], modes[:, 0]]) / self.modulus[inside]
        i1 = modes[:, 0].astype(int) + r
        i2 = modes[:, 1].astype(int) + r
        j1, j2 = 2 * r - i1, 2 * r - i2
        for comp in range(2):
            series.data[:, comp, i1, i2] = c * unit[comp]
            series.data[:, comp, j1, j2] = np.conj(c) * unit[comp]
        return series

    def field(self, k: int) -> VectorField:
        return self.series(k, k + 1).field(k)

    def hs_norm(self, s: float, k_start: int = 0, k_stop: Optional[int] = None) -> np.ndarray:
        """‖z(t_k)‖_{Ḣ^s} for every k, computed in mode space."""
        k_stop = self.steps + 1 if k_stop is None else k_stop
        c = self.coefficients(k_start, k_stop)
        weight = self.modulus ** (2 * s)
        return np.sqrt(2 * TWO_PI_SQ * np.sum(weight * np.abs(c) ** 2, axis=1))

    def mode_norm(self, s: float):
        """Ḣ^s norm of one coefficient sample (or difference) over this process' modes."""
        weight = 2 * TWO_PI_SQ * self.modulus ** (2 * s)
        return lambda c: float(np.sqrt(np.sum(weight * np.abs(c) ** 2)))

    def truncate(self, f_cut: float) -> "ZProcess":
        """Hard cutoff 1{|m| <= f_cut}."""
        keep = self.modulus <= f_cut
        return ZProcess(self.grid, self.dt, self.modes[keep], self.coeffs[:, keep], cutoff=f_cut)

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)


def solve_stokes_z(noise: NoiseRealization, sigma: float, T: Optional[float] = None, logger=None) -> ZProcess:
    """
    Solve dz + [∇p + Λ^{3/2−2σ}z]dt = dB mode by mode.

    The noise is divergence-free by construction (direction m^⊥/|m|), so the
    pressure never enters and each mode is an independent OU process.

    Args:
        noise: Sampled realization.
        sigma: Regularity exponent.
        T: Final time; defaults to the realization's horizon.
    """
    steps = noise.steps if T is None else min(noise.steps, int(np.ceil(T / noise.dt - 1e-9)))
    mu = ou_rate(noise.modes, sigma)
    coeffs = simulate_ou_modes(noise.g, mu, noise.dt, noise.xi[:steps])
    if logger:
        logger.debug(f"Solved Stokes z on {steps} steps over {len(noise.modes)} modes")
    return ZProcess(noise.grid, noise.dt, noise.modes, coeffs)


def truncate_z(z: ZProcess, q: int, sched) -> ZProcess:
    """z_q: Fourier cutoff of z at f(q) = λ_q/4."""
    return z.truncate(sched.f_cut(q))

# noise/wiener.py

import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from ..spectral.grid import PeriodicGrid

TWO_PI_SQ = (2 * np.pi) ** 2


def noise_modes(band: float) -> np.ndarray:
    """
    Half-plane representatives m with 0 < |m| <= band, as an (M, 2) float array.

    A mode m is kept when m₁ > 0, or m₁ = 0 and m₂ > 0; its partner −m is
    carried implicitly by conjugation.
    """
    r = int(math.floor(band))
    m1, m2 = np.meshgrid(np.arange(-r, r + 1), np.arange(-r, r + 1), indexing="ij")
    m1, m2 = m1.ravel(), m2.ravel()
    upper = (m1 > 0) | ((m1 == 0) & (m2 > 0))
    inside = np.hypot(m1, m2) <= band
    keep = upper & inside
    return np.stack([m1[keep], m2[keep]], axis=1).astype(float)


def noise_exponent(sigma: float, eta: float) -> float:
    """Decay exponent of g_m in |m|: (7/4 + 4σ) + 1 + η/2."""
    return 1.75 + 4 * sigma + 1.0 + 0.5 * eta


def noise_amplitudes(modes: np.ndarray, sigma: float, eta: float, amplitude: float = 1.0) -> np.ndarray:
    """g_m = amplitude · |m|^{−(7/4+4σ)−1−η/2}."""
    modulus = np.hypot(modes[:, 0], modes[:, 1])
    return amplitude * modulus ** (-noise_exponent(sigma, eta))


def noise_trace(modes: np.ndarray, g: np.ndarray, sigma: float, eta: float, band: float) -> Tuple[float, float]:
    """
    Tr((−Δ)^{7/4+4σ} GG*) over the sampled modes (both m and −m), and an
    integral bound on the tail beyond 'band' for a unit amplitude.

    Returns:
        (partial sum, tail bound). The summand decays as |m|^{−2−η}, so the
        tail is at most 2π band^{−η}/η.
    """
    s = 1.75 + 4 * sigma
    modulus = np.hypot(modes[:, 0], modes[:, 1])
    partial = float(2.0 * np.sum(modulus ** (2 * s) * g ** 2))
    tail = 2 * np.pi * max(band, 1.0) ** (-eta) / eta
    return partial, tail


@dataclass
class NoiseRealization:
    """
    One seeded noise path on the grid t_k = k·dt, k = 0..steps.

    Attributes:
        xi: Complex unit Gaussian increments (steps, M) with E|ξ|² = 1, one per
            half-plane mode; step k drives the update from t_k to t_{k+1}.
        scalar: Standard normal increments (steps,) for the scalar Brownian
            motion of the multiplicative case.
    """
    grid: PeriodicGrid
    seed: int
    dt: float
    steps: int
    sigma: float
    eta: float
    band: float
    amplitude: float
    modes: np.ndarray
    g: np.ndarray
    xi: np.ndarray
    scalar: np.ndarray

    @property
    def horizon(self) -> float:
        return self.steps * self.dt

    def truncated_after(self, k_cut: int) -> "NoiseRealization":
        """Copy with every increment driving steps k >= k_cut set to zero."""
        xi = self.xi.copy()
        scalar = self.scalar.copy()
        xi[k_cut:] = 0.0
        scalar[k_cut:] = 0.0
        return replace(self, xi=xi, scalar=scalar)

    def trace(self) -> Tuple[float, float]:
        return noise_trace(self.modes, self.g, self.sigma, self.eta, self.band)

    def describe(self) -> dict:
        partial, tail = self.trace()
        return {
            "seed": self.seed,
            "dt": self.dt,
            "steps": self.steps,
            "modes": int(len(self.modes)),
            "band": self.band,
            "amplitude": self.amplitude,
            "decay_exponent": noise_exponent(self.sigma, self.eta),
            "trace_partial": partial,
            "trace_tail_bound": tail,
        }


def sample_noise(grid: PeriodicGrid, sigma: float, eta: float, dt: float, steps: int, seed: int,
                 amplitude: float = 1.0, band: Optional[float] = None, logger=None) -> NoiseRealization:
    """
    Draw the mode-wise and scalar Brownian increments of one realization.

    Mode increments come from default_rng([seed, 1]) and scalar increments
    from default_rng([seed, 2]), so the two streams are independent and each
    is reproducible on its own.

    Raises:
        BandExceedsGrid: If 'band' exceeds the grid's dealias radius.
    """
    band = grid.dealias_radius if band is None else band
    grid.require_band(band, what="noise band")
    modes = noise_modes(band)
    g = noise_amplitudes(modes, sigma, eta, amplitude)
    mode_rng = np.random.default_rng([seed, 1])
    raw = mode_rng.standard_normal((steps, len(modes), 2))
    xi = (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0)
    scalar = np.random.default_rng([seed, 2]).standard_normal(steps)
    noise = NoiseRealization(grid=grid, seed=seed, dt=dt, steps=steps, sigma=sigma, eta=eta, band=band,
                             amplitude=amplitude, modes=modes, g=g, xi=xi, scalar=scalar)
    if logger:
        partial, tail = noise.trace()
        logger.debug(f"Sampled noise: {len(modes)} modes, {steps} steps, trace {partial:.4g} (tail <= {tail:.3g})")
    return noise

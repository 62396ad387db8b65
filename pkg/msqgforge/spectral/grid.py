# spectral/grid.py

from functools import partial, cached_property

import numpy as np
from scipy.fft import fft2, ifft2, fftfreq

from ..errors import BandExceedsGrid, ConfigError


class PeriodicGrid:
    """
    Uniform N x N grid on the 2-torus of side 2π.

    Points sit at x_j = 2πj/N, which samples [−π, π]² up to a periodic shift.
    Fourier coefficients follow f(x) = Σ_m f̂(m) e^{im·x}, so the forward map
    is fft2 / N² and the inverse is ifft2 · N². Arrays are indexed [i1, i2]
    with i1 along x₁.
    """

    def __init__(self, N: int, workers: int = 1):
        if N % 2 != 0:
            raise ConfigError(f"Grid size N must be even, got {N}")
        if N < 16:
            raise ConfigError(f"Grid size N must be at least 16, got {N}")
        self.N = int(N)
        self.workers = int(workers)
        self.spacing = 2 * np.pi / self.N
        # Two-thirds rule on the sup-norm of the mode index.
        self.dealias_radius = (self.N - 1) // 3
        self._fft = partial(fft2, workers=self.workers)
        self._ifft = partial(ifft2, workers=self.workers)

    def __repr__(self) -> str:
        return f"PeriodicGrid(N={self.N}, workers={self.workers})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PeriodicGrid) and other.N == self.N

    def __hash__(self) -> int:
        return hash(self.N)

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Integer mode numbers in FFT order."""
        return np.rint(fftfreq(self.N, 1.0 / self.N)).astype(np.int64)

    @cached_property
    def m1(self) -> np.ndarray:
        return np.broadcast_to(self.frequencies[:, None], (self.N, self.N)).astype(float)

    @cached_property
    def m2(self) -> np.ndarray:
        return np.broadcast_to(self.frequencies[None, :], (self.N, self.N)).astype(float)

    @cached_property
    def modulus(self) -> np.ndarray:
        """|m| on the mode lattice."""
        return np.hypot(self.m1, self.m2)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        return np.maximum(np.abs(self.m1), np.abs(self.m2)) <= self.dealias_radius

    @cached_property
    def points(self):
        x = self.spacing * np.arange(self.N)
        return np.meshgrid(x, x, indexing="ij")

    def forward(self, values: np.ndarray) -> np.ndarray:
        """Physical samples (..., N, N) to Fourier coefficients."""
        return self._fft(values, axes=(-2, -1)) / self.N ** 2

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        """Fourier coefficients (..., N, N) to complex physical samples."""
        return self._ifft(coeffs, axes=(-2, -1)) * self.N ** 2

    def require_band(self, radius: float, what: str = "band") -> None:
        """
        Raises:
            BandExceedsGrid: If 'radius' exceeds the dealias radius.
        """
        if radius > self.dealias_radius:
            raise BandExceedsGrid(
                f"{what} radius {radius:g} exceeds dealias radius {self.dealias_radius} of N={self.N}"
            )

    def box_indices(self, radius: int) -> np.ndarray:
        """FFT-order indices of modes with |m_i| <= radius, in increasing mode order."""
        radius = int(min(radius, self.N // 2 - 1))
        modes = np.arange(-radius, radius + 1)
        return np.mod(modes, self.N)

    def box_modes(self, radius: int) -> np.ndarray:
        radius = int(min(radius, self.N // 2 - 1))
        return np.arange(-radius, radius + 1, dtype=float)

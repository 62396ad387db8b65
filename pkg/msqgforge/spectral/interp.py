# spectral/interp.py

import numpy as np
from scipy.ndimage import map_coordinates, spline_filter

from .grid import PeriodicGrid

SPLINE_ORDER = 3


def evaluate_box(box: np.ndarray, modes: np.ndarray, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """
    Evaluate Σ_m box[..., a, b] e^{i(m_a x1 + m_b x2)} at arbitrary points.

    Args:
        box: Coefficients (..., K, K) indexed by the mode list 'modes' on both axes.
        modes: Increasing mode numbers of length K.
        x1, x2: Point coordinates of equal shape.

    Returns:
        Complex values of shape box.shape[:-2] + x1.shape.
    """
    shape = np.shape(x1)
    p1 = np.ravel(x1)
    p2 = np.ravel(x2)
    e1 = np.exp(1j * np.outer(p1, modes))
    e2 = np.exp(1j * np.outer(p2, modes))
    lead = box.shape[:-2]
    flat = box.reshape((-1,) + box.shape[-2:])
    out = np.empty((flat.shape[0], p1.size), dtype=complex)
    for c, coeffs in enumerate(flat):
        out[c] = np.einsum("pa,pa->p", e1 @ coeffs, e2)
    return out.reshape(lead + shape)


def evaluate(coeffs: np.ndarray, grid: PeriodicGrid, x1: np.ndarray, x2: np.ndarray,
             radius: int = None) -> np.ndarray:
    """Trigonometric interpolation of full-grid coefficients at arbitrary points."""
    if radius is None:
        radius = support_radius(coeffs, grid)
    idx = grid.box_indices(radius)
    box = coeffs[..., idx[:, None], idx[None, :]]
    return evaluate_box(box, grid.box_modes(radius), x1, x2)


def support_radius(coeffs: np.ndarray, grid: PeriodicGrid) -> int:
    """Smallest box radius holding every nonzero coefficient."""
    nonzero = np.any(np.abs(coeffs.reshape((-1,) + coeffs.shape[-2:])) > 0, axis=0)
    if not nonzero.any():
        return 0
    f = np.abs(grid.frequencies)
    return int(max(f[np.any(nonzero, axis=1)].max(), f[np.any(nonzero, axis=0)].max()))


def resample(coeffs: np.ndarray, source: PeriodicGrid, target: PeriodicGrid) -> np.ndarray:
    """
    Move Fourier coefficients between grids by zero padding or truncation.

    Coefficients are grid independent under the f̂ = fft/N² convention, so
    modes shared by both grids are copied and the rest are dropped or zero.
    """
    radius = min(source.N, target.N) // 2 - 1
    src = source.box_indices(radius)
    dst = target.box_indices(radius)
    out = np.zeros(coeffs.shape[:-2] + (target.N, target.N), dtype=complex)
    out[..., dst[:, None], dst[None, :]] = coeffs[..., src[:, None], src[None, :]]
    return out


def spline_coefficients(values: np.ndarray, order: int = SPLINE_ORDER) -> np.ndarray:
    """Periodic B-spline coefficients of grid samples, filtered over the last two axes."""
    flat = np.asarray(values, dtype=float).reshape((-1,) + np.shape(values)[-2:])
    out = np.stack([spline_filter(v, order=order, mode="grid-wrap") for v in flat])
    return out.reshape(np.shape(values))


def interpolate_periodic(coeffs: np.ndarray, spacing: float, x1: np.ndarray, x2: np.ndarray,
                         order: int = SPLINE_ORDER) -> np.ndarray:
    """
    Evaluate prefiltered periodic splines at arbitrary points.

    Args:
        coeffs: Output of spline_coefficients, shape (..., N, N), sample (i, j)
            sitting at (i·spacing, j·spacing).
        x1, x2: Point coordinates of equal shape; any real values, wrapped.

    Returns:
        Real values of shape coeffs.shape[:-2] + x1.shape.
    """
    shape = np.shape(x1)
    coords = np.stack([np.ravel(x1) / spacing, np.ravel(x2) / spacing])
    flat = coeffs.reshape((-1,) + coeffs.shape[-2:])
    out = np.stack([map_coordinates(c, coords, order=order, mode="grid-wrap", prefilter=False) for c in flat])
    return out.reshape(coeffs.shape[:-2] + shape)

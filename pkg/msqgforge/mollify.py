# mollify.py

import math
from typing import Tuple, Union

import numpy as np

from .errors import InsufficientHistory
from .spectral.fields import Field, FieldSeries, ScalarPath
from .spectral.symbols import smooth_step

# E|Y| for a planar Gaussian with unit covariance; ‖f∗φ_l − f‖_∞ <= l·‖∇f‖_∞ times this.
SPACE_FIRST_MOMENT = math.sqrt(math.pi / 2.0)

# Sample offsets within this many ulps of a support edge snap onto it.
_EDGE = 1e-9


def space_symbol(modulus: np.ndarray, ell: float) -> np.ndarray:
    """Gaussian multiplier φ̂(l m) = exp(−|l m|²/2)."""
    return np.exp(-0.5 * (ell * np.asarray(modulus)) ** 2)


def mollify_space(f: Field, ell: float) -> Field:
    """
    Convolve with the spatial mollifier at scale 'ell'.

    Raises:
        ValueError: If ell is not positive.
    """
    if ell <= 0:
        raise ValueError(f"Mollification scale must be positive, got {ell}")
    return f._new(f.coeffs * space_symbol(f.grid.modulus, ell))


def mollify_space_series(series: FieldSeries, ell: float) -> FieldSeries:
    """mollify_space applied sample by sample in the series' own coefficient box."""
    if ell <= 0:
        raise ValueError(f"Mollification scale must be positive, got {ell}")
    grid = series.grid
    if series.radius is None:
        modulus = grid.modulus
    else:
        modes = grid.box_modes(series.radius)
        modulus = np.hypot(modes[:, None], modes[None, :])
    return series.with_data(series.k0, series.data * space_symbol(modulus, ell))


def kernel(s: np.ndarray, width: float) -> np.ndarray:
    """
    Unnormalized time kernel: a smooth bump in s supported on (width, 2·width],
    centred at 1.5·width and vanishing at both ends.
    """
    s = np.asarray(s, dtype=float)
    u = np.abs(s - 1.5 * width) / (0.5 * width)
    out = smooth_step(u)
    out[(s <= width) | (s > 2 * width)] = 0.0
    return out


def lag_weights(width: float, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Integer lags i with i·dt in (width, 2·width] and their normalized weights,
    used for evaluation at grid times.

    Raises:
        ValueError: If no lag carries positive weight (width below dt).
    """
    lo = int(math.floor(width / dt + _EDGE)) + 1
    hi = int(math.floor(2 * width / dt + _EDGE))
    lags = np.arange(lo, hi + 1)
    weights = kernel(lags * dt, width) if lags.size else np.zeros(0)
    total = weights.sum()
    if lags.size == 0 or total <= 0:
        raise ValueError(f"Time mollifier of width {width:g} has no positive weight on a grid of step {dt:g}")
    keep = weights > 0
    return lags[keep], weights[keep] / total


def weights_at(t: float, width: float, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """Sample indices k with t − k·dt in (width, 2·width] and normalized weights for an arbitrary time t."""
    k_lo = int(math.ceil((t - 2 * width) / dt - _EDGE))
    k_hi = int(math.ceil((t - width) / dt - _EDGE)) - 1
    ks = np.arange(k_lo, k_hi + 1)
    weights = kernel(t - ks * dt, width) if ks.size else np.zeros(0)
    total = weights.sum()
    if ks.size == 0 or total <= 0:
        raise ValueError(f"Time mollifier of width {width:g} has no positive weight at t={t:g}")
    keep = weights > 0
    return ks[keep], weights[keep] / total


def first_moment(width: float, dt: float) -> float:
    """c with F_l(t) = t − c·width for F(t) = t; lies in (1, 2]."""
    lags, weights = lag_weights(width, dt)
    return float(np.sum(weights * lags * dt) / width)


Series = Union[FieldSeries, ScalarPath]


def _check_history(series: Series, k_needed_lo: int, k_needed_hi: int) -> None:
    if k_needed_lo < series.k0 or k_needed_hi >= series.k1:
        raise InsufficientHistory(
            f"Mollification needs samples [{k_needed_lo}, {k_needed_hi}] but the series covers "
            f"[{series.k0}, {series.k1 - 1}]"
        )


def mollify_time(series: Series, width: float, k_start: int, k_stop: int) -> Series:
    """
    One-sided time mollification F_l(t_k) = Σ_i w_i F(t_{k−i}) for k in [k_start, k_stop).

    Only samples strictly older than t_k − width are read.

    Raises:
        InsufficientHistory: If the series does not reach 2·width before t_{k_start}.
    """
    lags, weights = lag_weights(width, series.dt)
    _check_history(series, k_start - int(lags.max()), k_stop - 1 - int(lags.min()))
    data = series.data
    count = k_stop - k_start
    out = np.zeros((count,) + data.shape[1:], dtype=data.dtype)
    for lag, weight in zip(lags, weights):
        lo = k_start - lag - series.k0
        out += weight * data[lo:lo + count]
    return series.with_data(k_start, out)


def mollify_time_at(series: Series, width: float, t: float):
    """
    F_l(t) at an arbitrary (possibly off-grid) time.

    Returns:
        A Field for field series, a float for scalar paths.

    Raises:
        InsufficientHistory: If the needed samples are not in the series.
    """
    ks, weights = weights_at(t, width, series.dt)
    _check_history(series, int(ks.min()), int(ks.max()))
    rows = series.data[ks - series.k0]
    combined = np.tensordot(weights, rows, axes=(0, 0))
    if isinstance(series, ScalarPath):
        return float(combined)
    return series.kind(series.grid, series.expand(combined))

# spectral/norms.py

from typing import Callable, Optional

import numpy as np

from .fields import Field, VectorField, SymTFField

TWO_PI_SQ = (2 * np.pi) ** 2


def norm_sup(f: Field) -> float:
    """
    Sup over the grid: absolute value for scalars, pointwise Euclidean
    length for vectors, largest entry for symmetric trace-free matrices.
    """
    values = f.values()
    if isinstance(f, VectorField):
        return float(np.max(np.hypot(np.abs(values[0]), np.abs(values[1]))))
    if isinstance(f, SymTFField):
        return float(np.max(np.abs(values)))
    return float(np.max(np.abs(values)))


def hs_weight(grid, s: float) -> np.ndarray:
    """|m|^{2s} with the zero mode weighted 1 for s = 0 and 0 otherwise."""
    mod = grid.modulus
    if s == 0:
        return np.ones_like(mod)
    weight = np.zeros_like(mod)
    np.power(mod, 2 * s, out=weight, where=mod > 0)
    return weight


def norm_hs_sq(f: Field, s: float) -> float:
    """‖f‖²_{Ḣ^s} = (2π)² Σ_m |m|^{2s} |f̂(m)|² summed over components."""
    weight = hs_weight(f.grid, s)
    return float(TWO_PI_SQ * np.sum(weight * np.abs(f.coeffs) ** 2))


def norm_hs(f: Field, s: float) -> float:
    return float(np.sqrt(norm_hs_sq(f, s)))


def norm_c1(f: Field) -> float:
    """‖f‖_C + max_i ‖∂_i f‖_C."""
    g = f.grid
    grads = [f._new(1j * g.m1 * f.coeffs), f._new(1j * g.m2 * f.coeffs)]
    return norm_sup(f) + max(_entry_sup(d) for d in grads)


def _entry_sup(f: Field) -> float:
    return float(np.max(np.abs(f.values())))


def _default_norm(x: np.ndarray) -> float:
    return float(np.max(np.abs(x)))


def dyadic_gaps(count: int):
    gap = 1
    while gap < count:
        yield gap
        gap *= 2


def holder_time(samples: np.ndarray, dt: float, exponent: float,
                norm: Optional[Callable[[np.ndarray], float]] = None) -> float:
    """
    Discrete time-Hölder seminorm sup ‖F(t+g) − F(t)‖ / g^θ over the dyadic
    gap set {dt, 2dt, 4dt, ...}.

    Args:
        samples: Array with time on axis 0.
        dt: Sample spacing.
        exponent: Hölder exponent θ.
        norm: Norm of one sample difference; defaults to the max modulus.
    """
    norm = norm or _default_norm
    samples = np.asarray(samples)
    best = 0.0
    for gap in dyadic_gaps(len(samples)):
        diffs = samples[gap:] - samples[:-gap]
        scale = (gap * dt) ** exponent
        best = max(best, max(norm(d) for d in diffs) / scale)
    return best


def holder_running(samples: np.ndarray, dt: float, exponent: float,
                   norm: Optional[Callable[[np.ndarray], float]] = None) -> np.ndarray:
    """
    Running Hölder norm on [t_0, t_k] for every k: running sup of ‖F‖ plus
    the running dyadic seminorm. Entry k only reads samples 0..k.
    """
    norm = norm or _default_norm
    samples = np.asarray(samples)
    count = len(samples)
    sizes = np.array([norm(s) for s in samples])
    running = np.maximum.accumulate(sizes) if count else sizes
    semi = np.zeros(count)
    for gap in dyadic_gaps(count):
        ratios = np.zeros(count)
        diffs = samples[gap:] - samples[:-gap]
        ratios[gap:] = [norm(d) for d in diffs]
        ratios /= (gap * dt) ** exponent
        semi = np.maximum(semi, np.maximum.accumulate(ratios))
    return running + semi


def box_weight(grid, radius, s: float) -> np.ndarray:
    """hs_weight restricted to the compact box of a series (the full grid when radius is None)."""
    if radius is None:
        return hs_weight(grid, s)
    modes = grid.box_modes(radius)
    mod = np.hypot(modes[:, None], modes[None, :])
    if s == 0:
        return np.ones_like(mod)
    weight = np.zeros_like(mod)
    np.power(mod, 2 * s, out=weight, where=mod > 0)
    return weight


def series_hs_sq(series, s: float) -> np.ndarray:
    """‖F(t_k)‖²_{Ḣ^s} for every sample of a FieldSeries."""
    weight = box_weight(series.grid, series.radius, s)
    axes = tuple(range(1, series.data.ndim))
    return TWO_PI_SQ * np.sum(weight * np.abs(series.data) ** 2, axis=axes)


def series_sup(series) -> np.ndarray:
    """norm_sup of every sample of a FieldSeries."""
    return np.array([norm_sup(f) for f in series.fields()])

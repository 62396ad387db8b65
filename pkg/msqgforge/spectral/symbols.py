# spectral/symbols.py

import numpy as np

PLATEAU_RADIUS = 1.0 / 16.0
SUPPORT_RADIUS = 1.0 / 8.0


def smooth_step(s: np.ndarray) -> np.ndarray:
    """exp(1 − 1/(1 − s²)) on [0, 1): equals 1 at s = 0, decays to 0 at s = 1; 0 for s >= 1."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = s < 1.0
    si = np.clip(s[inside], 0.0, None)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - si * si))
    return out


def bump(xi_norm: np.ndarray) -> np.ndarray:
    """
    Radial plateau symbol K̂(ξ) of |ξ|.

    Returns 1 for |ξ| <= 1/16, exp(1 − 1/(1 − s²)) with s = (|ξ| − 1/16)/(1/16)
    in between, and 0 for |ξ| >= 1/8.
    """
    r = np.asarray(xi_norm, dtype=float)
    s = (r - PLATEAU_RADIUS) / (SUPPORT_RADIUS - PLATEAU_RADIUS)
    return np.where(r <= PLATEAU_RADIUS, 1.0, smooth_step(s))


def band_symbol(m1: np.ndarray, m2: np.ndarray, k, lam: float) -> np.ndarray:
    """K̂(m/λ − k) on the mode lattice."""
    return bump(np.hypot(m1 / lam - k[0], m2 / lam - k[1]))


def annulus_symbol(modulus: np.ndarray, lam: float) -> np.ndarray:
    """Radial symbol supported in [λ/4, 4λ] and equal to 1 on [3λ/8, 3λ]."""
    r = np.asarray(modulus, dtype=float)
    rising = smooth_step((3 * lam / 8 - r) / (lam / 8))
    falling = smooth_step((r - 3 * lam) / lam)
    out = np.where(r < 3 * lam / 8, rising, np.where(r > 3 * lam, falling, 1.0))
    out[(r <= lam / 4) | (r >= 4 * lam)] = 0.0
    return out

# spectral/constants.py

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from .fields import ScalarField, VectorField
from .grid import PeriodicGrid
from .norms import norm_sup, norm_hs
from .operators import band_project, inverse_divergence


@dataclass
class MeasuredConstants:
    """Probe-based values for the projector bound C1 and the Sobolev constants C_S, C_0."""
    C1: float
    C_S: float
    C_0: float
    probes: int
    ratios: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "C1": self.C1,
            "C_S": self.C_S,
            "C_0": self.C_0,
            "probes": self.probes,
            "ratios": dict(self.ratios),
        }


def random_coefficients(grid: PeriodicGrid, shape, low: float, high: float, decay: float,
                        rng: np.random.Generator) -> np.ndarray:
    """Gaussian coefficients on low <= |m| <= high (inside the dealias box), weighted |m|^{-decay}, made real."""
    mod = grid.modulus
    mask = (mod >= max(low, 1.0)) & (mod <= high) & grid.dealias_mask
    weight = np.zeros_like(mod)
    np.power(mod, -decay, out=weight, where=mask)
    raw = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * weight
    values = grid.inverse(raw).real
    return grid.forward(values)


def random_vector(grid, low, high, decay, rng) -> VectorField:
    return VectorField(grid, random_coefficients(grid, (2, grid.N, grid.N), low, high, decay, rng))


def random_scalar(grid, low, high, decay, rng) -> ScalarField:
    return ScalarField(grid, random_coefficients(grid, (grid.N, grid.N), low, high, decay, rng))


def measure_projector_bound(grid: PeriodicGrid, lambdas: Iterable[float], directions: Sequence,
                            probes: int, rng: np.random.Generator) -> float:
    """
    Lower-bound probe of sup ‖ℙ_{λ,k} f‖_C / ‖f‖_C over C⁰-normalized fields,
    taking one maximum over every λ that fits the grid and every direction.

    Half of the probes concentrate near frequency λ, the rest are broadband.
    """
    best = 0.0
    fitting = [lam for lam in lambdas if 9.0 * lam / 8.0 <= grid.dealias_radius]
    for lam in fitting:
        for i in range(probes):
            if i % 2 == 0:
                f = random_vector(grid, lam / 2, 2 * lam, 0.0, rng)
            else:
                f = random_vector(grid, 1.0, grid.dealias_radius, 1.0, rng)
            size = norm_sup(f)
            if size == 0:
                continue
            for k in directions:
                best = max(best, norm_sup(band_project(f, k, lam)) / size)
    return best


def measure_sobolev_constants(grid: PeriodicGrid, sigma: float, probes: int,
                              rng: np.random.Generator) -> Dict[str, float]:
    """
    Largest observed ratios for the embedding, product and inverse-divergence
    bounds at exponent σ, over mean-zero probes with spectra inside half the
    dealias radius so products are not truncated.
    """
    high = grid.dealias_radius / 2
    ratios = {"embedding": 0.0, "product": 0.0, "inverse_divergence_sup": 0.0, "inverse_divergence_sobolev": 0.0}
    half = (1.0 + sigma) / 2.0
    for i in range(probes):
        decay = 1.0 + (i % 3)
        f = random_scalar(grid, 1.0, high, decay, rng)
        g = random_scalar(grid, 1.0, high, decay, rng)
        if norm_hs(f, 1 + sigma) > 0:
            ratios["embedding"] = max(ratios["embedding"], norm_sup(f) / norm_hs(f, 1 + sigma))
        product = ScalarField.from_physical(grid, f.physical() * g.physical())
        denom = norm_hs(f, half) * norm_hs(g, half)
        if denom > 0:
            ratios["product"] = max(ratios["product"], norm_hs(product, sigma) / denom)
        v = random_vector(grid, 1.0, high, decay, rng)
        Bv = inverse_divergence(v)
        if norm_sup(v) > 0:
            ratios["inverse_divergence_sup"] = max(ratios["inverse_divergence_sup"], norm_sup(Bv) / norm_sup(v))
        if norm_hs(v, sigma) > 0:
            ratios["inverse_divergence_sobolev"] = max(
                ratios["inverse_divergence_sobolev"], norm_hs(Bv, 1 + sigma) / norm_hs(v, sigma))
    return ratios


def measure_constants(grid: PeriodicGrid, sigma: float, lambdas: Iterable[float], directions: Sequence,
                      probes: int, seed: int, logger: Optional[object] = None) -> MeasuredConstants:
    """
    Measure C1, C_S and C_0. Sobolev and inverse-divergence ratios are doubled;
    C1 and C_S are floored at 1.
    """
    rng = np.random.default_rng([seed, 0x5EC])
    C1 = max(1.0, measure_projector_bound(grid, lambdas, directions, probes, rng))
    ratios = measure_sobolev_constants(grid, sigma, probes, rng)
    C_S = max(1.0, 2.0 * max(ratios["embedding"], ratios["product"]))
    C_0 = 2.0 * max(ratios["inverse_divergence_sup"], ratios["inverse_divergence_sobolev"])
    result = MeasuredConstants(C1=C1, C_S=C_S, C_0=C_0, probes=probes, ratios=ratios)
    if logger:
        logger.info(f"Measured constants: C1={C1:.4f}, C_S={C_S:.4f}, C_0={C_0:.4f} over {probes} probes")
    return result

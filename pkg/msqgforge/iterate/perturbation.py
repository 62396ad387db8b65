# iterate/perturbation.py

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from ..geometry import DirectionSystem, Parity
from ..spectral.fields import FieldSeries, ScalarPath, SymTFField, VectorField
from ..spectral.grid import PeriodicGrid
from ..spectral.operators import band_project
from ..transport import FlowMap, phase, transport_stress
from .amplitudes import amplitude
from .cutoffs import CutoffFamily

TWO_PI_SQ = (2 * np.pi) ** 2


def wave_radius(lam: float) -> int:
    """Box radius holding the band-projector output 7λ/8 <= |m| <= 9λ/8."""
    return int(math.ceil(9 * lam / 8))


def plane_wave(grid: PeriodicGrid, direction, lam: float) -> np.ndarray:
    x1, x2 = grid.points
    return np.exp(1j * lam * (direction[0] * x1 + direction[1] * x2))


def wave(a: np.ndarray, psi: np.ndarray, direction, lam: float, grid: PeriodicGrid) -> VectorField:
    """ℙ_{λ,k}(a · b_k(λΦ)) with b_k(λΦ) = i k^⊥ e^{iλk·x} ψ."""
    f = a * psi * plane_wave(grid, direction, lam)
    values = np.stack([-1j * direction[1] * f, 1j * direction[0] * f])
    return band_project(VectorField.from_physical(grid, values), direction, lam)


@dataclass
class SliceInput:
    """Everything slice j needs: its flow, the mollified stress at the anchor and ρ_j."""
    j: int
    flow: FlowMap
    R_anchor: SymTFField
    rho: float
    upsilon_l: Optional[ScalarPath] = None


@dataclass
class SliceWaves:
    """Compressed contribution χ_j Σ_k ℙ_{λ,k}(a_{k,j} b_k(λΦ_j)) at the slice's targets."""
    j: int
    ks: np.ndarray
    boxes: np.ndarray
    quadrature: np.ndarray
    scaled: int
    max_distance: float


def build_slice(inp: SliceInput, cutoffs: CutoffFamily, geo: DirectionSystem, lam: float, grid: PeriodicGrid,
                radius: int, slack: float = 0.0) -> SliceWaves:
    flow = inp.flow
    parity = Parity.of(inp.j)
    directions = geo.select(parity).directions
    transported = transport_stress(inp.R_anchor, flow, grid)
    template = FieldSeries.zeros(VectorField, grid, int(flow.ks[0]), len(flow.ks), flow.dt, radius)
    boxes = np.zeros_like(template.data)
    quadrature = np.zeros(len(flow.ks))
    scaled, worst = 0, 0.0
    for i, k in enumerate(flow.ks):
        k = int(k)
        t = k * flow.dt
        weight = float(cutoffs.value(inp.j, t))
        if weight == 0.0:
            continue
        mollified = None
        if inp.upsilon_l is not None:
            mollified = float(inp.upsilon_l.values[k - inp.upsilon_l.k0])
        amps = amplitude(transported.field(k).physical(), inp.rho, lam, geo, parity, slack, mollified)
        scaled += int(amps.scaled)
        worst = max(worst, amps.distance)
        total = VectorField.zeros(grid)
        for d in directions:
            psi = phase(flow, d, lam, k, grid).values()
            total = total + wave(amps.values[(float(d[0]), float(d[1]))], psi, d, lam, grid)
        boxes[i] = template.compress(weight * total.coeffs)
        quadrature[i] = 4 * weight ** 2 * inp.rho * TWO_PI_SQ / (1.0 if mollified is None else mollified)
    return SliceWaves(j=inp.j, ks=np.asarray(flow.ks), boxes=boxes, quadrature=quadrature, scaled=scaled,
                      max_distance=worst)


@dataclass
class Perturbation:
    """w_{q+1} with the leading-order energy Σ_j 4χ_j²ρ_j(2π)² (over Υ_l when multiplicative) per sample."""
    w: FieldSeries
    quadrature: np.ndarray
    scaled: int
    max_distance: float
    slices: List[int] = field(default_factory=list)


def build_perturbation(inputs: Sequence[SliceInput], cutoffs: CutoffFamily, geo: DirectionSystem, lam: float,
                       grid: PeriodicGrid, k_start: int, k_stop: int, dt: float, slack: float = 0.0,
                       workers: int = 1, logger=None) -> Perturbation:
    """
    w = Σ_{j,k} χ_j ℙ_{λ,k}(a_{k,j} b_k(λΦ_j)) on [k_start, k_stop).

    Slices are built concurrently and added in increasing j, so the sum
    does not depend on 'workers'.

    Raises:
        BandExceedsGrid: If 9λ/8 exceeds the dealias radius.
    """
    grid.require_band(9 * lam / 8, what="perturbation band")
    radius = wave_radius(lam)
    w = FieldSeries.zeros(VectorField, grid, k_start, k_stop - k_start, dt, radius)
    quadrature = np.zeros(k_stop - k_start)
    ordered = sorted(inputs, key=lambda s: s.j)
    job: Callable[[SliceInput], SliceWaves] = lambda s: build_slice(s, cutoffs, geo, lam, grid, radius, slack)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(job, ordered))
    scaled, worst = 0, 0.0
    for res in results:
        for i, k in enumerate(res.ks):
            if k_start <= k < k_stop:
                w.data[k - k_start] += res.boxes[i]
                quadrature[k - k_start] += res.quadrature[i]
        scaled += res.scaled
        worst = max(worst, res.max_distance)
    if logger:
        logger.debug(f"Perturbation at λ={lam:g}: {len(results)} slices, {scaled} ball pull-backs")
    return Perturbation(w=w, quadrature=quadrature, scaled=scaled, max_distance=worst,
                        slices=[r.j for r in results])

# transport.py

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import CFLViolation, InsufficientHistory
from .spectral.fields import FieldSeries, ScalarField, SymTFField
from .spectral.grid import PeriodicGrid
from .spectral.interp import (evaluate, evaluate_box, interpolate_periodic, resample, spline_coefficients,
                              support_radius)

Drift = Callable[[float, np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]


def _rk4(drift, t, x1, x2, h, n_steps: int):
    """Classical RK4; t and h may be scalars or arrays broadcasting against x1."""
    for _ in range(n_steps):
        a1, a2 = drift(t, x1, x2)
        b1, b2 = drift(t + h / 2, x1 + h / 2 * a1, x2 + h / 2 * a2)
        c1, c2 = drift(t + h / 2, x1 + h / 2 * b1, x2 + h / 2 * b2)
        d1, d2 = drift(t + h, x1 + h * c1, x2 + h * c2)
        x1 = x1 + h / 6 * (a1 + 2 * b1 + 2 * c1 + d1)
        x2 = x2 + h / 6 * (a2 + 2 * b2 + 2 * c2 + d2)
        t = t + h
    return x1, x2


def integrate_characteristics(drift: Drift, t0: float, t1: float, x1: np.ndarray, x2: np.ndarray,
                              n_steps: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Solve dX/ds = drift(s, X) from X(t0) = x to s = t1 with n_steps RK4 steps.

    Returns:
        Unwrapped positions (X₁, X₂) at t1.
    """
    h = (t1 - t0) / n_steps
    return _rk4(drift, t0, np.asarray(x1, dtype=float), np.asarray(x2, dtype=float), h, n_steps)


def lagrange_weights(u: float, count: int, nodes: int = 4) -> Tuple[int, np.ndarray]:
    """
    Weights of the 'nodes'-point Lagrange rule at fractional index u over
    samples 0..count-1, shifted inward at the ends.

    Returns:
        (base, weights): the first sample used and one weight per node.
    """
    nodes = min(nodes, count)
    base = int(np.clip(math.floor(u) - (nodes // 2 - 1), 0, count - nodes))
    xs = np.arange(base, base + nodes, dtype=float)
    weights = np.array([np.prod((u - np.delete(xs, i)) / (xi - np.delete(xs, i))) for i, xi in enumerate(xs)])
    return base, weights


class DriftSampler:
    """
    Velocity field known by Fourier boxes at t_k = k·dt, evaluated anywhere.

    Time uses 4-point Lagrange interpolation of the coefficients, shifted
    inward at the ends of the sampled range; space uses exact trigonometric
    evaluation of the box.
    """

    def __init__(self, series: FieldSeries, kind: str = "additive"):
        if series.radius is None:
            raise ValueError("DriftSampler needs a compact series")
        self.series = series
        self.kind = kind
        self.dt = series.dt
        self.k0 = series.k0
        self.modes = series.grid.box_modes(series.radius)

    @property
    def t_min(self) -> float:
        return self.k0 * self.dt

    @property
    def t_max(self) -> float:
        return (self.series.k1 - 1) * self.dt

    def covers(self, t0: float, t1: float) -> bool:
        lo, hi = min(t0, t1), max(t0, t1)
        eps = 1e-9 * self.dt
        return lo >= self.t_min - eps and hi <= self.t_max + eps

    def box_at(self, t: float) -> np.ndarray:
        base, weights = lagrange_weights(t / self.dt - self.k0, len(self.series))
        return np.tensordot(weights, self.series.data[base:base + len(weights)], axes=1)

    def __call__(self, t, x1, x2):
        v = evaluate_box(self.box_at(float(t)), self.modes, x1, x2).real
        return v[0], v[1]

    def grid_values(self, k: int, grid: PeriodicGrid) -> np.ndarray:
        """Velocity at t_k on every point of 'grid', shape (2, N, N); modes past grid.N // 2 - 1 are dropped."""
        R = self.series.radius
        r = min(R, grid.N // 2 - 1)
        box = self.series.data[k - self.k0][..., R - r:R + r + 1, R - r:R + r + 1]
        idx = grid.box_indices(r)
        full = np.zeros((2, grid.N, grid.N), dtype=complex)
        full[:, idx[:, None], idx[None, :]] = box
        return grid.inverse(full).real

    def max_speed(self) -> float:
        """Upper bound on |v| over the sampled range from coefficient sums."""
        if len(self.series) == 0:
            return 0.0
        sums = np.sum(np.abs(self.series.data), axis=(-2, -1))
        return float(np.max(np.hypot(sums[:, 0], sums[:, 1])))


class GridDrift:
    """
    A DriftSampler sampled on a periodic grid at t_k for k in [k_lo, k_hi).

    Space uses periodic cubic splines through the grid samples; time uses
    the same Lagrange rule as the sampler, applied to the spline coefficients.
    """

    def __init__(self, drift: DriftSampler, grid: PeriodicGrid, k_lo: int, k_hi: int):
        self.k0 = max(k_lo, drift.k0)
        k_hi = min(k_hi, drift.series.k1)
        self.grid = grid
        self.dt = drift.dt
        self.values = np.stack([drift.grid_values(k, grid) for k in range(self.k0, k_hi)])
        self.splines = spline_coefficients(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def velocity(self, k: int) -> np.ndarray:
        return self.values[k - self.k0]

    def __call__(self, t, x1, x2):
        base, weights = lagrange_weights(float(t) / self.dt - self.k0, len(self))
        coeffs = np.tensordot(weights, self.splines[base:base + len(weights)], axes=1)
        v = interpolate_periodic(coeffs, self.grid.spacing, x1, x2)
        return v[0], v[1]


@dataclass
class FlowMap:
    """
    Φ_j(t, x) = x + D(t, x) for target grid times ks, with Φ_j(anchor, x) = x.

    The displacement is sampled on a dedicated flow grid and resampled
    spectrally onto any finer grid. n_steps counts RK4 steps per dt.
    """
    j: int
    anchor: float
    ks: np.ndarray
    displacement: np.ndarray
    flow_grid: PeriodicGrid
    drift_kind: str
    n_steps: int
    dt: float
    residual: Optional[float] = None

    def index(self, k: int) -> int:
        hits = np.flatnonzero(self.ks == k)
        if hits.size == 0:
            raise IndexError(f"flow {self.j} has no target at k={k}")
        return int(hits[0])

    def upsampled(self, k: int, grid: PeriodicGrid) -> np.ndarray:
        """Displacement at t_k on 'grid', shape (2, N, N)."""
        D = self.displacement[self.index(k)]
        if grid == self.flow_grid:
            return D
        coeffs = resample(self.flow_grid.forward(D), self.flow_grid, grid)
        return grid.inverse(coeffs).real

    def jacobian_range(self) -> Tuple[float, float]:
        """min and max of det(∇Φ) over targets and flow grid points."""
        g = self.flow_grid
        coeffs = g.forward(self.displacement)
        d = np.stack([g.inverse(1j * g.m1 * coeffs).real, g.inverse(1j * g.m2 * coeffs).real])
        # d[i, t, c] = ∂_i D_c
        det = (1 + d[0, :, 0]) * (1 + d[1, :, 1]) - d[1, :, 0] * d[0, :, 1]
        return float(det.min()), float(det.max())

    def to_dict(self) -> dict:
        lo, hi = self.jacobian_range()
        return {"j": self.j, "anchor": self.anchor, "targets": int(len(self.ks)), "n_steps": self.n_steps,
                "max_displacement": float(np.max(np.abs(self.displacement))) if self.displacement.size else 0.0,
                "jacobian_min": lo, "jacobian_max": hi, "jacobian_flag": not (0.5 < lo and hi < 2.0),
                "transport_residual": self.residual}


def _compose(drift: GridDrift, t: float, t_prev: float, D_prev: Optional[np.ndarray], x1, x2,
             substeps: int) -> np.ndarray:
    """D(t) from D(t_prev) through Φ(t, x) = Φ(t_prev, X(t_prev; t, x))."""
    n = max(1, int(math.ceil(abs(t_prev - t) / drift.dt * substeps - 1e-9)))
    X1, X2 = integrate_characteristics(drift, t, t_prev, x1, x2, n)
    D = np.stack([X1 - x1, X2 - x2])
    if D_prev is not None:
        D += interpolate_periodic(spline_coefficients(D_prev), drift.grid.spacing, X1, X2)
    return D


def solve_flow(drift: DriftSampler, j: int, anchor: float, ks: Sequence[int], flow_grid: PeriodicGrid,
               substeps: int = 1, logger=None) -> FlowMap:
    """
    Build Φ_j on the flow grid at every target t_k by composing one sample
    interval at a time outward from the anchor τj, forward and backward:
    Φ(t_k, ·) = Φ(t_prev, X(t_prev; t_k, ·)) with t_prev the neighbouring
    sample (or τj itself) nearer the anchor.

    Each interval takes 'substeps' RK4 steps through the drift sampled on
    the flow grid, so the cost is linear in the number of samples. A target
    at the anchor itself is the identity exactly.

    Raises:
        CFLViolation: If max|drift| times the step length exceeds the flow grid spacing.
        InsufficientHistory: If the drift does not cover the characteristics.
    """
    ks = np.asarray(ks, dtype=int)
    if not len(ks):
        raise ValueError(f"flow {j} has no target times")
    dt = drift.dt
    times = ks * dt
    if not (drift.covers(float(times.min()), anchor) and drift.covers(float(times.max()), anchor)):
        raise InsufficientHistory(f"drift covers [{drift.t_min:g}, {drift.t_max:g}] but flow {j} spans "
                                  f"[{min(times.min(), anchor):g}, {max(times.max(), anchor):g}]")
    step = dt / substeps
    speed = drift.max_speed()
    if speed * step > flow_grid.spacing:
        raise CFLViolation(f"flow {j}: max|v|·h = {speed * step:.4g} exceeds grid spacing {flow_grid.spacing:.4g}")

    k_lo, k_hi = int(ks.min()), int(ks.max())
    k_anchor = anchor / dt
    sampled = GridDrift(drift, flow_grid, min(k_lo, math.floor(k_anchor)) - 2, max(k_hi, math.ceil(k_anchor)) + 3)
    x1, x2 = flow_grid.points
    maps = {}
    for direction in (1, -1):
        k = math.ceil(k_anchor - 1e-9) if direction > 0 else math.floor(k_anchor + 1e-9)
        t_prev, D_prev = anchor, None
        while k_lo <= k <= k_hi:
            t = k * dt
            if abs(t - anchor) <= 1e-9 * dt:
                D = np.zeros((2,) + x1.shape)
            else:
                D = _compose(sampled, t, t_prev, D_prev, x1, x2, substeps)
            maps[k] = D
            t_prev, D_prev = t, D
            k += direction
    displacement = np.stack([maps[int(k)] for k in ks])
    flow = FlowMap(j=j, anchor=anchor, ks=ks, displacement=displacement, flow_grid=flow_grid,
                   drift_kind=drift.kind, n_steps=substeps, dt=dt)
    flow.residual = transport_residual(flow, sampled)
    if logger:
        logger.debug(f"Flow {j}: {len(ks)} targets, {substeps} steps per sample, residual {flow.residual}")
    return flow


def transport_residual(flow: FlowMap, drift: GridDrift) -> Optional[float]:
    """
    sup|∂_tΦ + (v·∇)Φ| on the flow grid, with ∂_t by second-order differences
    over consecutive targets; None when fewer than three targets exist.
    """
    if len(flow.ks) < 3 or np.any(np.diff(flow.ks) != 1):
        return None
    g = flow.flow_grid
    D = flow.displacement
    dDdt = np.gradient(D, flow.dt, axis=0, edge_order=2)
    coeffs = g.forward(D)
    d1 = g.inverse(1j * g.m1 * coeffs).real
    d2 = g.inverse(1j * g.m2 * coeffs).real
    worst = 0.0
    for i, k in enumerate(flow.ks):
        v1, v2 = drift.velocity(int(k))
        r1 = dDdt[i, 0] + v1 + v1 * d1[i, 0] + v2 * d2[i, 0]
        r2 = dDdt[i, 1] + v2 + v1 * d1[i, 1] + v2 * d2[i, 1]
        worst = max(worst, float(np.max(np.hypot(r1, r2))))
    return worst


def transport_stress(R_anchor: SymTFField, flow: FlowMap, grid: PeriodicGrid) -> FieldSeries:
    """
    R̊_{q,j}(t_k, x) = R̊_l(τj, Φ_j(t_k, x)) for every target k on 'grid'.

    The composition is evaluated exactly at the flow grid points and then
    resampled spectrally onto 'grid'.

    Returns:
        A full-grid SymTFField series indexed by the flow's targets.
    """
    g = flow.flow_grid
    x1, x2 = g.points
    radius = support_radius(R_anchor.coeffs, R_anchor.grid)
    fields = []
    for D in flow.displacement:
        values = evaluate(R_anchor.coeffs, R_anchor.grid, x1 + D[0], x2 + D[1], radius).real
        coeffs = g.forward(values)
        if grid != g:
            coeffs = resample(coeffs, g, grid)
        fields.append(SymTFField(grid, coeffs))
    return FieldSeries.from_fields(fields, k0=int(flow.ks[0]), dt=flow.dt, kind=SymTFField, grid=grid)


def phase(flow: FlowMap, direction, lam: float, k: int, grid: PeriodicGrid) -> ScalarField:
    """ψ = e^{iλ k·(Φ_j − x)} at t_k on 'grid'."""
    D = flow.upsampled(k, grid)
    values = np.exp(1j * lam * (direction[0] * D[0] + direction[1] * D[1]))
    return ScalarField.from_physical(grid, values)


def identity_defect(drift: Drift, t0: float, t1: float, grid: PeriodicGrid, n_steps: int) -> float:
    """Integrate grid points from t0 to t1 and back; sup distance from the start."""
    x1, x2 = grid.points
    y1, y2 = integrate_characteristics(drift, t0, t1, x1, x2, n_steps)
    z1, z2 = integrate_characteristics(drift, t1, t0, y1, y2, n_steps)
    return float(np.max(np.hypot(z1 - x1, z2 - x2)))


def convergence_order(drift: Drift, t0: float, t1: float, x1: np.ndarray, x2: np.ndarray,
                      steps: Sequence[int], exact: Optional[Callable] = None) -> List[float]:
    """
    Observed orders log₂(e_n / e_{2n}) under step doubling.

    Errors are against 'exact(x1, x2)' when given, else against a run with
    four times the finest step count.
    """
    if exact is None:
        ref = integrate_characteristics(drift, t0, t1, x1, x2, 4 * max(steps))
    else:
        ref = exact(x1, x2)
    errors = []
    for n in steps:
        y1, y2 = integrate_characteristics(drift, t0, t1, x1, x2, n)
        errors.append(float(np.max(np.hypot(y1 - ref[0], y2 - ref[1]))))
    return [math.log2(a / b) if b > 0 else math.inf for a, b in zip(errors, errors[1:])]

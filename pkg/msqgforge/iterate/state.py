# iterate/state.py

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ..noise.multiplicative import UpsilonPaths, upsilon_paths
from ..noise.stokes import ZProcess, truncate_z
from ..params import Mode, ParamSchedule
from ..spectral.fields import FieldSeries, ScalarField, ScalarPath, SymTFField, VectorField
from ..spectral.grid import PeriodicGrid
from ..spectral.norms import series_hs_sq
from ..spectral.operators import (
    div_tensor,
    frac_laplacian,
    inverse_divergence,
    pressure_poisson,
    sqg_nonlinearity,
    dot,
)


def y_radius(sched: ParamSchedule, q: int) -> int:
    """Box radius holding B(0, 2λ_q)."""
    return int(math.ceil(2 * sched.lam_at(q)))


def stress_radius(sched: ParamSchedule, q: int, grid: PeriodicGrid) -> int:
    """Box radius holding B(0, 4λ_q), capped at the dealias radius."""
    return int(min(math.ceil(4 * sched.lam_at(q)), grid.dealias_radius))


@dataclass
class NoiseContext:
    """The noise a run is driven by: z (additive) or the path B behind Υ = e^B (multiplicative)."""
    mode: Mode
    dt: float
    sigma: float
    z: Optional[ZProcess] = None
    B: Optional[ScalarPath] = None
    L: Optional[float] = None

    def z_stage(self, q: int, sched: ParamSchedule) -> Optional[ZProcess]:
        if self.z is None:
            return None
        return truncate_z(self.z, q, sched)

    def z_series(self, q: int, sched: ParamSchedule, k_start: int, k_stop: int,
                 radius: Optional[int] = None) -> Optional[FieldSeries]:
        """z_q on [k_start, k_stop); None in multiplicative mode."""
        zq = self.z_stage(q, sched)
        if zq is None:
            return None
        return zq.series(k_start, k_stop, radius)

    def b_values(self, k_start: int, k_stop: int) -> np.ndarray:
        """B(t_k), extended by 0 before t = 0."""
        out = np.zeros(k_stop - k_start)
        if self.B is None:
            return out
        if k_stop > self.B.k1:
            raise IndexError(f"B is sampled up to k={self.B.k1 - 1}, requested up to {k_stop - 1}")
        lo = max(k_start, self.B.k0)
        if k_stop > lo:
            out[lo - k_start:] = self.B.values[lo - self.B.k0:k_stop - self.B.k0]
        return out

    def upsilon_values(self, k_start: int, k_stop: int) -> np.ndarray:
        return np.exp(self.b_values(k_start, k_stop))

    def upsilon(self, width: float, k_start: int, k_stop: int) -> UpsilonPaths:
        B = self.B if self.B is not None else ScalarPath(0, self.dt, np.zeros(max(k_stop, 1)))
        return upsilon_paths(B, width, k_start, k_stop)


@dataclass
class IterationState:
    """
    (y_q, R̊_q, p_q) sampled on t_k for k in [y.k0, y.k1).

    y is stored in the box of B(0, 2λ_q), R̊ in the box of B(0, 4λ_q) and p
    in the dealias box.
    """
    q: int
    mode: Mode
    y: FieldSeries
    R: FieldSeries
    p: FieldSeries
    noise: NoiseContext
    schedule: ParamSchedule
    clipped: int = 0

    @property
    def grid(self) -> PeriodicGrid:
        return self.y.grid

    @property
    def dt(self) -> float:
        return self.y.dt

    @property
    def k_start(self) -> int:
        return self.y.k0

    @property
    def k_stop(self) -> int:
        return self.y.k1

    def times(self) -> np.ndarray:
        return self.y.times()

    def z_series(self, radius: Optional[int] = None, k_start: Optional[int] = None,
                 k_stop: Optional[int] = None) -> Optional[FieldSeries]:
        radius = self.y.radius if radius is None else radius
        return self.noise.z_series(self.q, self.schedule, self.k_start if k_start is None else k_start,
                                   self.k_stop if k_stop is None else k_stop, radius)

    def solution_energy(self, k_start: Optional[int] = None, k_stop: Optional[int] = None) -> np.ndarray:
        """‖v_q(t_k)‖²_{Ḣ^{1/2}} with v_q = y_q + z_q (additive) or Υ y_q (multiplicative)."""
        k_start = self.k_start if k_start is None else k_start
        k_stop = self.k_stop if k_stop is None else k_stop
        y = self.y.window(k_start, k_stop)
        if self.mode is Mode.ADDITIVE:
            z = self.z_series(y.radius, k_start, k_stop)
            return series_hs_sq(y.with_data(k_start, y.data + z.data), 0.5)
        upsilon = self.noise.upsilon_values(k_start, k_stop)
        return upsilon ** 2 * series_hs_sq(y, 0.5)

    def to_dict(self) -> dict:
        return {"q": self.q, "mode": self.mode.value, "k_start": self.k_start, "k_stop": self.k_stop,
                "y_radius": self.y.radius, "stress_radius": self.R.radius, "clipped": self.clipped}


def base_step(mode: Mode, noise: NoiseContext, sched: ParamSchedule, grid: PeriodicGrid, k_start: int,
              k_stop: int, logger=None) -> IterationState:
    """
    The q = 0 state on [k_start, k_stop).

    Additive: y₀ = 0 and R̊₀ = ℬ(N(z₀) + Λ^γz₀ − Λ^{3/2−2σ}z₀), with p₀ the
    gradient part of the same forcing; R̊₀ vanishes for t <= 0 where z₀ does.
    Multiplicative: everything is zero.
    """
    mode = Mode(mode)
    dt = noise.dt
    count = k_stop - k_start
    y = FieldSeries.zeros(VectorField, grid, k_start, count, dt, y_radius(sched, 0))
    R = FieldSeries.zeros(SymTFField, grid, k_start, count, dt, stress_radius(sched, 0, grid))
    p = FieldSeries.zeros(ScalarField, grid, k_start, count, dt, grid.dealias_radius)
    if mode is Mode.ADDITIVE and noise.z is not None:
        z0 = noise.z_series(0, sched, k_start, k_stop, y.radius)
        s = 1.5 - 2 * noise.sigma
        for k in range(max(k_start, 1), k_stop):
            zk = z0.field(k)
            if not np.any(zk.coeffs):
                continue
            forcing = sqg_nonlinearity(zk) + frac_laplacian(zk, sched.gamma) - frac_laplacian(zk, s)
            Rk = inverse_divergence(forcing)
            R.set(k, Rk)
            p.set(k, pressure_poisson(div_tensor(Rk) - forcing))
    if logger:
        logger.info(f"Base step ({mode.value}) on k=[{k_start}, {k_stop})")
    return IterationState(q=0, mode=mode, y=y, R=R, p=p, noise=noise, schedule=sched)


def compose_iterate(state: IterationState, y_l: FieldSeries, w: FieldSeries, p_l: FieldSeries,
                    pressure_velocity: FieldSeries, R_next: FieldSeries) -> IterationState:
    """
    y_{q+1} = y_l + w and p_{q+1} = p_l + w·U, with U = Λ(y_l + z_{q+1}) (additive)
    or Υ_lΛy_l (multiplicative). All inputs share the new window.
    """
    q1 = state.q + 1
    sched = state.schedule
    grid = state.grid
    k_start, k_stop = w.k0, w.k1
    y = FieldSeries.zeros(VectorField, grid, k_start, k_stop - k_start, w.dt, y_radius(sched, q1))
    p = FieldSeries.zeros(ScalarField, grid, k_start, k_stop - k_start, w.dt, grid.dealias_radius)
    for k in range(k_start, k_stop):
        wk = w.field(k)
        y.set(k, y_l.field(k) + wk)
        p.set(k, p_l.field(k) + dot(wk, pressure_velocity.field(k)))
    return replace(state, q=q1, y=y, R=R_next, p=p, clipped=0)

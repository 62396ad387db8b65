# iterate/stage.py

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ..errors import ConfigError, NumericalFault
from ..geometry import DirectionSystem
from ..mollify import lag_weights, mollify_space_series, mollify_time, mollify_time_at
from ..noise.multiplicative import UpsilonPaths
from ..params import Mode, ParamSchedule, stage_factors
from ..spectral.fields import FieldSeries, ScalarPath, VectorField
from ..spectral.grid import PeriodicGrid
from ..spectral.norms import series_hs_sq
from ..spectral.operators import div, perp_curl, spectral_mass_outside
from ..stress import ResidualReport, StressBreakdown, StressInputs, assemble_stress, residual
from ..transport import DriftSampler, FlowMap, solve_flow
from .amplitudes import rho
from .cutoffs import CutoffFamily, cutoff_family
from .energy import GapSeries, energy_gap
from .inductive import hs_split
from .perturbation import Perturbation, SliceInput, build_perturbation
from .state import IterationState, NoiseContext, compose_iterate, stress_radius, y_radius

TWO_PI_SQ = (2 * np.pi) ** 2
STRESS_PREFACTOR = 1.0 / (32 * TWO_PI_SQ)


def time_step(sched: ParamSchedule, samples_per_tau: int, dt: Optional[float] = None) -> float:
    """dt from config, else the finest slice width τ_{Q−1} over samples_per_tau."""
    if dt is not None:
        return float(dt)
    return sched.tau_at(max(sched.Q - 1, 1)) / samples_per_tau


def stage_margin(sched: ParamSchedule, q: int, dt: float) -> int:
    """Samples stage q−1 must hold before stage q starts: 3τ_q of mollifier and anchor history."""
    return int(math.ceil(3 * sched.tau_at(q) / dt)) + 4


@dataclass
class StageWindows:
    """Stage q lives on t_k for k in [starts[q], k_stop)."""
    starts: List[int]
    k_stop: int
    dt: float

    def window(self, q: int):
        return self.starts[q], self.k_stop

    def to_dict(self) -> dict:
        return {"starts": list(self.starts), "k_stop": self.k_stop, "dt": self.dt,
                "t_start": [k * self.dt for k in self.starts], "t_stop": (self.k_stop - 1) * self.dt,
                "anchor": "stage.windows"}


def stage_windows(sched: ParamSchedule, dt: float, stopping: float, horizon: Optional[float] = None,
                  window_start: Optional[float] = None) -> StageWindows:
    """
    Windows of stages 0..Q−1 ending at min(stopping, horizon).

    Each stage starts no earlier than its t_q and at least stage_margin
    samples after the previous one. 'window_start' places the last stage;
    the earlier ones are laid out backward from it.

    Raises:
        ConfigError: If the last stage would hold fewer than three samples.
    """
    end = stopping if horizon is None else min(stopping, horizon)
    k_stop = int(math.floor(end / dt + 1e-9)) + 1
    Q = sched.Q
    earliest = [int(math.ceil(sched.t_start[q] / dt - 1e-9)) for q in range(Q)]
    desired = [0] * Q
    desired[Q - 1] = earliest[Q - 1] if window_start is None else int(math.ceil(window_start / dt - 1e-9))
    for q in range(Q - 2, -1, -1):
        desired[q] = desired[q + 1] - stage_margin(sched, q + 1, dt)
    starts = [max(earliest[q], desired[q]) for q in range(Q)]
    for q in range(1, Q):
        starts[q] = max(starts[q], starts[q - 1] + stage_margin(sched, q, dt))
    if k_stop - starts[Q - 1] < 3:
        raise ConfigError(f"stage {Q - 1} window [{starts[Q - 1] * dt:g}, {end:g}] holds fewer than 3 samples")
    return StageWindows(starts=starts, k_stop=k_stop, dt=dt)


def flow_grid_size(sched: ParamSchedule, q: int, N: int, flow_points: Optional[int] = None) -> int:
    if flow_points is not None:
        return int(flow_points)
    size = 2 * (4 * int(math.ceil(2 * sched.lam_at(q))) + 1)
    return int(min(N, max(32, size + size % 2)))


def _lambda_box(series: FieldSeries) -> np.ndarray:
    """Λ applied to the coefficient box of a series."""
    modes = series.grid.box_modes(series.radius)
    modulus = np.hypot(modes[:, None], modes[None, :])
    return series.data * modulus


@dataclass
class MollifiedFields:
    """Stage-q fields mollified at l_{q+1} in space and τ_{q+1} in time (one-sided)."""
    y_l: FieldSeries
    z_l: Optional[FieldSeries]
    R_space: FieldSeries
    R_l: FieldSeries
    p_l: FieldSeries
    N_l: FieldSeries
    drift: DriftSampler
    upsilon: Optional[UpsilonPaths] = None


@dataclass
class StageResult:
    """Everything one step q → q+1 produced and measured."""
    state: IterationState
    perturbation: Perturbation
    breakdown: StressBreakdown
    residual: ResidualReport
    cutoffs: CutoffFamily
    gap: GapSeries
    flows: List[dict]
    rhos: Dict[int, float]
    checks: Dict[str, float]
    elapsed: float
    drift: Optional[DriftSampler] = None
    upsilon_l: Optional[ScalarPath] = None
    failures: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "q": self.state.q,
            "state": self.state.to_dict(),
            "slices": len(self.flows),
            "rho": {str(j): r for j, r in self.rhos.items()},
            "gap": self.gap.to_dict(),
            "ball_pullbacks": self.perturbation.scaled,
            "ball_distance": self.perturbation.max_distance,
            "checks": self.checks,
            "stress": self.breakdown.to_dict(),
            "residual": self.residual.to_dict(),
            "flows": self.flows,
            "failures": list(self.failures),
        }


class StageBuilder:
    """Carries one iterate to the next on the fixed stage windows."""

    def __init__(self, sched: ParamSchedule, geo: DirectionSystem, grid: PeriodicGrid, profile,
                 noise: NoiseContext, windows: StageWindows, tolerances, flow_points: Optional[int] = None,
                 flow_substeps: int = 1, workers: int = 1, keep_components: bool = False, logger=None):
        self.sched = sched
        self.geo = geo
        self.grid = grid
        self.profile = profile
        self.noise = noise
        self.windows = windows
        self.tolerances = tolerances
        self.flow_points = flow_points
        self.flow_substeps = flow_substeps
        self.workers = workers
        self.keep_components = keep_components
        self.logger = logger

    def _log_debug(self, msg: str) -> None:
        if self.logger:
            self.logger.debug(msg)

    def _log_warning(self, msg: str) -> None:
        if self.logger:
            self.logger.warning(msg)

    def mollify(self, state: IterationState) -> MollifiedFields:
        """Mollified y, z, R̊, p and nonlinearity of stage q over the ranges step q → q+1 reads."""
        q = state.q
        dt = state.dt
        tau = self.sched.tau_at(q + 1)
        ell = self.sched.ell_at(q + 1)
        k_a, k_end = self.windows.window(q + 1)
        halo = int(math.ceil(tau / dt))
        lags, _ = lag_weights(tau, dt)
        lo, hi = k_a - halo, k_end + halo
        history = max(state.k_start, k_a - halo - int(lags.max()))

        y_s = mollify_space_series(state.y.window(history, k_end), ell)
        y_l = mollify_time(y_s, tau, lo, hi)
        z_l = None
        ups = None
        if state.mode is Mode.ADDITIVE:
            z_s = mollify_space_series(state.z_series(state.y.radius, history, k_end), ell)
            z_l = mollify_time(z_s, tau, lo, hi)
            drift_data = _lambda_box(y_l.with_data(lo, y_l.data + z_l.data))
        else:
            ups = self.noise.upsilon(tau, state.k_start, hi)
            factors = ups.mollified.values[lo - ups.mollified.k0:hi - ups.mollified.k0]
            drift_data = _lambda_box(y_l) * factors[:, None, None, None]
        drift = DriftSampler(y_l.with_data(lo, drift_data), kind=state.mode.value)

        R_space = mollify_space_series(state.R, ell)
        R_l = mollify_time(R_space, tau, k_a, k_end)
        p_l = mollify_time(mollify_space_series(state.p, ell), tau, k_a, k_end)

        n_lo = max(state.k_start, k_a - int(lags.max()))
        N = FieldSeries.zeros(VectorField, self.grid, n_lo, k_end - n_lo, dt, self.grid.dealias_radius)
        z = state.z_series(state.y.radius, n_lo, k_end) if state.mode is Mode.ADDITIVE else None
        upsilon = self.noise.upsilon_values(n_lo, k_end) if state.mode is Mode.MULTIPLICATIVE else None
        for i, k in enumerate(range(n_lo, k_end)):
            v = state.y.field(k)
            if z is not None:
                v = v + z.field(k)
            scale = 1.0 if upsilon is None else float(upsilon[i])
            N.set(k, scale * perp_curl(v, v))
        N_l = mollify_time(mollify_space_series(N, ell), tau, k_a, k_end)
        return MollifiedFields(y_l=y_l, z_l=z_l, R_space=R_space, R_l=R_l, p_l=p_l, N_l=N_l, drift=drift,
                               upsilon=ups)

    def _slice_inputs(self, state: IterationState, mol: MollifiedFields, cutoffs: CutoffFamily,
                      gap: GapSeries) -> List[SliceInput]:
        q = state.q
        tau = cutoffs.tau
        k_a, k_end = self.windows.window(q + 1)
        ks = np.arange(k_a, k_end)
        flow_grid = PeriodicGrid(flow_grid_size(self.sched, q, self.grid.N, self.flow_points), self.grid.workers)
        jobs = [(j, cutoffs.targets(j, ks, state.dt)) for j in cutoffs.indices]
        jobs = [(j, t) for j, t in jobs if len(t)]

        def job(item):
            j, targets = item
            return solve_flow(mol.drift, j, cutoffs.anchor(j), targets, flow_grid, self.flow_substeps)

        with ThreadPoolExecutor(max_workers=max(1, self.workers)) as pool:
            flows: List[FlowMap] = list(pool.map(job, jobs))
        ell = self.sched.ell_at(q + 1)
        inputs = []
        for flow in flows:
            anchor = flow.anchor
            R_anchor = mollify_time_at(mol.R_space, tau, anchor)
            gamma_l = mollify_time_at(gap.path, tau, anchor)
            rho_j = rho(R_anchor, gamma_l, ell, self.geo.eps_gamma)
            ups_l = mol.upsilon.mollified if mol.upsilon is not None else None
            inputs.append(SliceInput(j=flow.j, flow=flow, R_anchor=R_anchor, rho=rho_j, upsilon_l=ups_l))
        return inputs

    def step(self, state: IterationState) -> StageResult:
        """
        One inductive step q → q+1 on stage q+1's window.

        Raises:
            NumericalFault: If NaN or Inf appears in y_{q+1} or R̊_{q+1}.
            InsufficientHistory: If stage q does not reach far enough back.
            OutsideBall: If a transported stress leaves the ball beyond the slack.
        """
        started = time.perf_counter()
        q = state.q
        sched = self.sched
        dt = state.dt
        tau = sched.tau_at(q + 1)
        lam = sched.lam_at(q + 1)
        k_a, k_end = self.windows.window(q + 1)

        mol = self.mollify(state)
        cutoffs = cutoff_family(sched, q, k_a * dt, (k_end - 1) * dt)
        ups_l = mol.upsilon.mollified if mol.upsilon is not None else None
        gap = energy_gap(state, self.profile, state.k_start, min(state.k_stop, k_end), ups_l, self.logger)
        inputs = self._slice_inputs(state, mol, cutoffs, gap)
        pert = build_perturbation(inputs, cutoffs, self.geo, lam, self.grid, k_a, k_end, dt,
                                  self.tolerances.ball_slack, self.workers, self.logger)
        w = pert.w

        y_l = mol.y_l.window(k_a, k_end)
        radius_next = y_radius(sched, q + 1)
        if state.mode is Mode.ADDITIVE:
            z_next = self.noise.z_series(q + 1, sched, k_a, k_end, radius_next)
            z_q = self.noise.z_series(q, sched, k_a, k_end, radius_next)
            z_l = mol.z_l.window(k_a, k_end)
            y_big = y_l.rebox(radius_next)
            velocity = y_big.with_data(k_a, _lambda_box(y_big.with_data(k_a, y_big.data + z_next.data)))
            upsilon = upsilon_l = None
        else:
            z_next = z_q = z_l = None
            upsilon = self.noise.upsilon_values(k_a, k_end)
            upsilon_l = ups_l.values[k_a - ups_l.k0:k_end - ups_l.k0]
            velocity = y_l.with_data(k_a, _lambda_box(y_l) * upsilon_l[:, None, None, None])

        e = np.asarray(self.profile.value((k_a + np.arange(k_end - k_a)) * dt), dtype=float)
        factor = stage_factors(state.mode, sched.L)["stress"]
        target = self.geo.eps_gamma * STRESS_PREFACTOR * sched.lam_delta(q + 3) * e * factor
        inputs_stress = StressInputs(mode=state.mode, gamma=sched.gamma, sigma=sched.sigma, w=w, y_l=y_l,
                                     R_l=mol.R_l, N_l=mol.N_l, z_l=z_l, z_q=z_q, z_next=z_next,
                                     upsilon=upsilon, upsilon_l=upsilon_l)
        breakdown = assemble_stress(inputs_stress, q, target, stress_radius(sched, q + 1, self.grid),
                                    self.keep_components, ball=4 * sched.lam_at(q + 1))
        nxt = compose_iterate(state, y_l, w, mol.p_l, velocity, breakdown.total)
        for name, series in (("y", nxt.y), ("R", nxt.R)):
            if not np.all(np.isfinite(series.data)):
                raise NumericalFault(f"non-finite values in {name} at stage {q + 1}")

        res = residual(nxt.y, nxt.R, state.mode, sched.gamma, sched.sigma, z=z_next, upsilon=upsilon, p=nxt.p)
        checks = self._measure(pert, y_l, z_next, lam)
        failures = self._failures(gap, pert, checks, res)
        for msg in failures:
            self._log_warning(f"Stage {q + 1}: {msg}")
        elapsed = time.perf_counter() - started
        self._log_debug(f"Stage {q} -> {q + 1}: {len(inputs)} slices in {elapsed:.2f}s")
        return StageResult(state=nxt, perturbation=pert, breakdown=breakdown, residual=res, cutoffs=cutoffs,
                           gap=gap, flows=[s.flow.to_dict() for s in inputs], rhos={s.j: s.rho for s in inputs},
                           checks=checks, elapsed=elapsed, drift=mol.drift, upsilon_l=ups_l, failures=failures)

    def _measure(self, pert: Perturbation, y_l: FieldSeries, z_next: Optional[FieldSeries], lam: float) -> Dict[str, float]:
        w = pert.w
        outside, divergence, imaginary = 0.0, 0.0, 0.0
        for f in w.fields():
            outside = max(outside, spectral_mass_outside(f, lam / 2, 2 * lam))
            size = float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2)))
            if size > 0:
                divergence = max(divergence, float(np.sqrt(np.sum(np.abs(div(f).coeffs) ** 2))) / size)
            imaginary = max(imaginary, f.imaginary_residue())
        energy = series_hs_sq(w, 0.5)
        quad = pert.quadrature
        mask = quad > 0
        quadrature = float(np.max(np.abs(energy[mask] - quad[mask]) / quad[mask])) if np.any(mask) else 0.0
        checks = {"w_outside_band": outside, "w_divergence": divergence, "w_imaginary": imaginary,
                  "energy_quadrature": quadrature, "split_y_w": hs_split(y_l, w)}
        if z_next is not None:
            checks["split_w_z"] = hs_split(w, z_next)
        return checks

    def _failures(self, gap: GapSeries, pert: Perturbation, checks: Dict[str, float],
                  res: ResidualReport) -> List[str]:
        tol = self.tolerances
        failures = []
        if gap.clipped:
            failures.append(f"energy gap clipped at {gap.clipped} samples")
        if pert.scaled:
            failures.append(f"transported stress pulled back onto the ball {pert.scaled} times")
        if checks["w_outside_band"] > 0:
            failures.append(f"perturbation mass outside its band: {checks['w_outside_band']:.3e}")
        if checks["w_divergence"] > tol.divergence:
            failures.append(f"perturbation divergence {checks['w_divergence']:.3e}")
        if checks["w_imaginary"] > tol.imaginary:
            failures.append(f"perturbation imaginary residue {checks['w_imaginary']:.3e}")
        if checks["energy_quadrature"] > tol.energy_quadrature:
            failures.append(f"energy quadrature defect {checks['energy_quadrature']:.3f}")
        if res.relative > tol.residual:
            failures.append(f"equation residual {res.relative:.3e}")
        return failures

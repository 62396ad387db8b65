# interface.py

import math
import os
import time
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .config import RunConfig
from .display import Display
from .errors import StrictModeFailure
from .geometry import build_direction_system
from .iterate import (
    IterationState,
    NoiseContext,
    StageBuilder,
    base_step,
    check_inductive,
    energy_defect,
    stage_windows,
    time_step,
)
from .logger import Logger
from .noise import (
    brownian_path,
    sample_noise,
    solve_stokes_z,
    stopping_time_additive,
    stopping_time_mult,
    survival_probability,
    upsilon_bounds,
)
from .params import Mode, build_schedule, check_admissibility, compute_M0
from .persistence import CheckpointWriter, ReportSaveManager, RunHistory
from .profiles import branch_profile, profile_from_config
from .spectral import PeriodicGrid, measure_constants
from .verify import VerifyReport, run_verify

# Energy traces closer than this (relative) count as identical.
SEPARATION_TOLERANCE = 1e-9
# Extra noise samples past the last window for the time mollifier's halo.
NOISE_PAD = 8


class Forge:
    """
    Runs the iteration for one configuration and writes its report.

    The pipeline is fixed: schedule and admissibility, grid and direction
    system, energy profile, measured constants and M₀, noise, stopping time,
    stage windows, then the base step and Q−1 inductive steps. Every stage
    block is appended to the run history as soon as it exists.
    """

    def __init__(self, config: RunConfig, display: Optional[Display] = None, logger: Optional[Logger] = None):
        """
        Args:
            config: Validated run configuration.
            display: Console renderer; a default one is created when None.
            logger: Logger to use; built from config.output when None.
        """
        self.config = config
        self._init_components(display, logger)

    def _init_components(self, display: Optional[Display], logger: Optional[Logger]) -> None:
        """
        Internal helper to set up logger, display, schedule, grid, profile and writers.
        """
        out = self.config.output
        try:
            self.logger = logger or Logger(
                __name__, out.logging, out.log_file,
                os.path.join(out.directory, "run_trace.json") if out.logging else None,
            )
            self.display = display or Display()
            self.mode = Mode(self.config.mode)

            s = self.config.schedule
            L = s.L if self.mode is Mode.MULTIPLICATIVE else None
            self.schedule = build_schedule(s.a, s.b, s.beta, s.alpha, s.gamma, s.sigma, s.Q, L, self.logger)
            self.regime = check_admissibility(self.schedule, self.mode)

            self.grid = PeriodicGrid(self.config.grid.N, self.config.workers)
            self.geo = build_direction_system()

            self.profile = profile_from_config(self.config.energy, self.logger)
            self.profile_bounds = self.profile.validate(-2.0, self._horizon_cap())

            self.save_manager = ReportSaveManager(out.directory)
            self.checkpoints = CheckpointWriter(os.path.join(out.directory, "checkpoints"), self.config.seed,
                                                self.logger)
            self.history = RunHistory(self.logger, self._config_section())
        except Exception as e:
            if getattr(self, "logger", None):
                self.logger.error(f"Init error: {e}")
            raise

    def _horizon_cap(self) -> float:
        """Right end of the time interval the construction may reach: 1 (additive) or L."""
        if self.mode is Mode.MULTIPLICATIVE:
            return float(self.config.schedule.L)
        return 1.0

    def _config_section(self) -> Dict[str, Any]:
        data = self.config.to_dict()
        data["run"].pop("workers", None)
        return data

    def _require_bands(self) -> None:
        sched = self.schedule
        if sched.Q >= 2:
            self.grid.require_band(9 * sched.lam_at(sched.Q - 1) / 8, what=f"stage {sched.Q - 1} perturbation band")

    def _measure_constants(self):
        sched = self.schedule
        lambdas = [sched.lam_at(q) for q in range(1, max(sched.Q, 2))
                   if 9 * sched.lam_at(q) / 8 <= self.grid.dealias_radius]
        constants = measure_constants(self.grid, sched.sigma, lambdas, self.geo.all_directions(),
                                      self.config.noise.probes, self.config.seed, self.logger)
        M0 = compute_M0(self.geo, constants.C1, seed=self.config.seed)
        self.schedule = sched.with_M0(M0)
        self.logger.info(f"Measured C1={constants.C1:.4g}, C_S={constants.C_S:.4g}, C_0={constants.C_0:.4g}; M0={M0:.4g}")
        return constants, M0

    def _sample_noise(self, dt: float):
        """
        Sample the realization far enough past the construction horizon for
        the stopping time and every stage's mollifier halo.
        """
        nc = self.config.noise
        sched = self.schedule
        cap = self._horizon_cap()
        halo = int(math.ceil(sched.tau_at(1) / dt)) if sched.Q >= 2 else 0
        steps = int(math.ceil(cap / dt - 1e-9)) + halo + NOISE_PAD
        band = 1.0 if self.mode is Mode.MULTIPLICATIVE else nc.band
        noise = sample_noise(self.grid, sched.sigma, nc.eta, dt, steps, self.config.seed,
                             amplitude=nc.amplitude, band=band, logger=self.logger)
        if self.mode is Mode.ADDITIVE:
            z = solve_stokes_z(noise, sched.sigma, logger=self.logger)
            ctx = NoiseContext(mode=self.mode, dt=dt, sigma=sched.sigma, z=z)
        else:
            B = brownian_path(noise)
            ctx = NoiseContext(mode=self.mode, dt=dt, sigma=sched.sigma, B=B, L=sched.L)
        return noise, ctx

    def _stopping_time(self, ctx: NoiseContext, constants):
        nc = self.config.noise
        if self.mode is Mode.ADDITIVE:
            return stopping_time_additive(ctx.z, self.schedule, constants.C_S, constants.C_0, nc.delta,
                                          self.geo.eps_gamma, self.profile_bounds.e_low,
                                          cap=self._horizon_cap(), logger=self.logger)
        return stopping_time_mult(ctx.B, self.schedule.L, nc.delta, logger=self.logger)

    @staticmethod
    def _energy_block(state: IterationState, profile) -> Dict[str, Any]:
        t = state.times()
        e = np.asarray(profile.value(t), dtype=float)
        energy = state.solution_energy()
        lam_delta = state.schedule.lam_delta(state.q + 1)
        return {
            "energy_trace": {"t": t, "e": e, "energy": energy, "ratio": (e - energy) / (lam_delta * e)},
            "energy_defect": float(np.max(energy_defect(state, profile))) if len(t) else 0.0,
        }

    def _checkpoint_state(self, state: IterationState, tag: str = "") -> List[str]:
        out = self.config.output
        if not out.checkpoints:
            return []
        saved = []
        for name, series in (("y", state.y), ("R", state.R)):
            path, error = self.checkpoints.write_series(f"{name}{tag}_q{state.q}", series, out.checkpoint_samples)
            if path:
                saved.append(path)
            elif error:
                self.logger.warning(f"Checkpoint of {name} at stage {state.q} skipped: {error}")
        return saved

    def _construct(self, profile, ctx: NoiseContext, windows, M0: float, e_bar: float,
                   record: bool = True, tag: str = "") -> Tuple[List[Dict[str, Any]], IterationState, List[str]]:
        """
        Base step plus the inductive steps for one energy profile.

        Args:
            record: Push each stage block into the run history and honour strict mode.
            tag: Suffix for checkpoint names.

        Returns:
            (stage blocks, final state, checkpoint paths)

        Raises:
            StrictModeFailure: In strict mode, when a stage reports a failure.
        """
        sched = self.schedule
        eps = self.geo.eps_gamma
        k_start, k_stop = windows.window(0)
        self.logger.at_stage(0)
        state = base_step(self.mode, ctx, sched, self.grid, k_start, k_stop, self.logger)
        block = {"q": 0, "state": state.to_dict(),
                 "inductive": check_inductive(state, profile, M0, e_bar, eps).to_dict(),
                 "failures": []}
        block.update(self._energy_block(state, profile))
        stages = [block]
        saved = self._checkpoint_state(state, tag) if record else []
        if record:
            self.history.update_state(stage=block)

        builder = StageBuilder(sched, self.geo, self.grid, profile, ctx, windows, self.config.tolerances,
                               flow_points=self.config.grid.flow_points,
                               flow_substeps=self.config.grid.flow_substeps,
                               workers=self.config.workers, logger=self.logger)
        for q in range(sched.Q - 1):
            self.logger.at_stage(q + 1)
            result = builder.step(state)
            previous, state = state, result.state
            self.logger.info(f"Stage {state.q}: {len(result.flows)} slices, stress ratio "
                             f"{result.breakdown.ratio:.3g}, {result.elapsed:.2f}s")
            inductive = check_inductive(state, profile, M0, e_bar, eps, previous=previous,
                                        drift=result.drift, upsilon_l=result.upsilon_l)
            block = result.to_dict()
            block["inductive"] = inductive.to_dict()
            block.update(self._energy_block(state, profile))
            stages.append(block)
            if record:
                self.history.update_state(stage=block)
                saved += self._checkpoint_state(state, tag)
                if result.failures and self.config.strict:
                    raise StrictModeFailure(f"stage {state.q}: " + "; ".join(result.failures))
        self.logger.at_stage(None)
        return stages, state, saved

    def _branch(self, ctx: NoiseContext, windows, M0: float, first_final: IterationState) -> Dict[str, Any]:
        """
        Rebuild on the same noise with an energy profile that leaves the
        primary one at branch_time and compare the final energies.
        """
        energy = self.config.energy
        second = profile_from_config(self.config.replace_energy(d1=energy.branch_d1).energy, self.logger)
        profile = branch_profile(self.profile, second, energy.branch_time, logger=self.logger)
        bounds = profile.validate(-2.0, self._horizon_cap())
        _, final, _ = self._construct(profile, ctx, windows, M0, bounds.e_bar, record=False)
        t = first_final.times()
        E1, E2 = first_final.solution_energy(), final.solution_energy()
        diff = np.abs(E1 - E2)
        scale = max(float(np.max(np.abs(E1))), 1e-300) if len(E1) else 1.0
        apart = np.nonzero(diff > SEPARATION_TOLERANCE * scale)[0]
        separation = float(t[apart[0]]) if len(apart) else None
        self.logger.info(f"Branch run: energies separate at {separation}")
        return {
            "branch_time": energy.branch_time,
            "branch_d1": energy.branch_d1,
            "profile": profile.to_dict(),
            "separation_time": separation,
            "max_difference": float(np.max(diff)) if len(diff) else 0.0,
            "anchor": "energy.branching",
        }

    def run(self) -> Dict[str, Any]:
        """
        Build every stage, write report.json, the CSV traces and checkpoints.

        Returns:
            The report dict as written.

        Raises:
            ConfigError: On an invalid configuration or an empty last window.
            BandExceedsGrid: If a perturbation band does not fit the grid.
            StrictModeFailure: In strict mode, when a stage reports a failure.
            NumericalFault: If NaN or Inf appears in an iterate.
        """
        started = time.perf_counter()
        cfg = self.config
        self._require_bands()
        self.history.update_state(mode=self.mode.value, regime=self.regime.to_dict(),
                                  geometry=self.geo.to_dict())

        constants, M0 = self._measure_constants()
        sched = self.schedule
        dt = time_step(sched, cfg.grid.samples_per_tau, cfg.grid.dt)
        noise, ctx = self._sample_noise(dt)
        stopping = self._stopping_time(ctx, constants)
        windows = stage_windows(sched, dt, stopping.value, cfg.horizon, cfg.window_start)
        sections = {
            "schedule": sched.to_dict(),
            "constants": constants.to_dict(),
            "M0": M0,
            "profile": {**self.profile.to_dict(), **self.profile_bounds.to_dict()},
            "noise": noise.describe(),
            "stopping": stopping.to_dict(),
            "windows": windows.to_dict(),
        }
        if self.mode is Mode.MULTIPLICATIVE:
            paths = ctx.upsilon(sched.tau_at(1) if sched.Q >= 2 else dt, 0, windows.k_stop)
            sections["upsilon_bounds"] = upsilon_bounds(paths, sched.L, windows.k_stop, cfg.noise.delta)
        self.history.update_state(**sections)
        self.display.show_run_header(self.history.create_state_snapshot())

        saved: List[str] = []
        failures: List[str] = []
        try:
            stages, final, saved = self._construct(self.profile, ctx, windows, M0, self.profile_bounds.e_bar)
        except StrictModeFailure as e:
            self.logger.at_stage(None)
            self._finish(saved, [str(e)])
            raise

        if self.config.output.checkpoints:
            if ctx.z is not None:
                path, _ = self.checkpoints.write_modes("z", ctx.z)
            else:
                path, _ = self.checkpoints.write_path("B", ctx.B)
            if path:
                saved.append(path)

        if cfg.noise.mc_paths > 0:
            levels = cfg.noise.mc_levels or [sched.L]
            table = survival_probability(levels, cfg.noise.mc_horizon, cfg.noise.mc_paths, cfg.noise.mc_dt,
                                         cfg.noise.delta, cfg.seed, cfg.workers, cfg.noise.amplitude, self.logger)
            self.history.update_state(survival=table.to_dict())
        if cfg.energy.branch_d1 is not None:
            self.history.update_state(branch=self._branch(ctx, windows, M0, final))

        for stage in stages:
            failures += [f"stage {stage['q']}: {msg}" for msg in stage.get("failures", [])]
        report = self._finish(saved, failures)
        self.logger.info(f"Run finished in {time.perf_counter() - started:.2f}s")
        return report

    def _finish(self, saved: List[str], failures: List[str]) -> Dict[str, Any]:
        report = self.history.create_state_snapshot()
        stages = report.get("stages", [])
        for writer in (lambda: self.save_manager.save_report(report),
                       lambda: self.save_manager.save_energy_trace(stages),
                       lambda: self.save_manager.save_stress_norms(stages)):
            path, error = writer()
            if path:
                saved.append(path)
            elif error:
                self.logger.error(f"Save failed: {error}")
        self.display.show_stages(stages)
        if "survival" in report:
            self.display.show_survival(report["survival"])
        if "branch" in report:
            self.display.show_branch(report["branch"])
        self.display.show_failures(failures)
        self.display.show_saved(saved)
        return report

    def verify(self) -> VerifyReport:
        """Run the invariant suite for this configuration and print its table."""
        report = run_verify(self.config, self.logger)
        self.display.show_verify(report)
        return report

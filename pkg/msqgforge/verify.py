# verify.py

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .config import RunConfig
from .geometry import DirectionSystem, build_direction_system, lattice_checks, sample_ball
from .iterate.cutoffs import cutoff_family
from .iterate.state import NoiseContext, base_step
from .mollify import lag_weights
from .noise.multiplicative import brownian_path, upsilon_paths
from .noise.stokes import ou_rate, ou_variance, simulate_ou_modes, solve_stokes_z
from .noise.stopping import stopping_time_additive, stopping_time_mult
from .noise.wiener import noise_amplitudes, sample_noise
from .params import Mode, ParamSchedule, build_schedule
from .spectral.constants import random_vector
from .spectral.fields import FieldSeries, ScalarPath, VectorField
from .spectral.grid import PeriodicGrid
from .spectral.norms import norm_sup
from .spectral.operators import (
    div_tensor,
    frac_laplacian,
    grad,
    inverse_divergence,
    leray_project,
    mean_free,
    sqg_nonlinearity,
    sqg_nonlinearity_expanded,
)
from .stress import residual, time_derivative
from .transport import DriftSampler, convergence_order, identity_defect, integrate_characteristics, phase, solve_flow

# key -> (anchor, description)
OPERATOR_GRIDS = (64, 128)
OPERATOR_FIELDS = 100

CATALOGUE: Dict[str, tuple] = {
    "band_fits": ("grid.dealias_band", "first perturbation band 9λ₁/8 fits inside the dealias radius"),
    "inverse_divergence": ("operators.inverse_divergence", "div ℬf = ℙℙ_{≠0}f on random band-limited fields"),
    "leray_idempotent": ("operators.leray", "ℙ∘ℙ = ℙ"),
    "leray_gradients": ("operators.leray", "ℙ annihilates gradients"),
    "fractional_inverse": ("operators.fractional_power", "Λ^rΛ^{−r} = id on mean-zero fields"),
    "sqg_identity": ("operators.sqg_identity", "u^⊥(∇^⊥·v) = (u·∇)v − (∇v)^Tu for u = Λv, v solenoidal"),
    "geometry_reconstruction": ("geometry.reconstruction", "½Σγ_k²k^⊥⊗k^⊥ = R on B(Id, ε_γ)"),
    "geometry_identity_coefficients": ("geometry.identity_coefficients", "c_k(Id) = (7/16, 25/32, 25/32) on Γ₁"),
    "geometry_lattice": ("geometry.lattice", "lattice membership, symmetry, disjointness, separation"),
    "cutoff_partition": ("cutoffs.partition", "Σ_jχ_j² = 1"),
    "cutoff_overlap": ("cutoffs.overlap", "at most two cutoffs active at any time"),
    "mollifier_one_sided": ("mollify.one_sided", "time weights nonnegative, sum 1, supported in (l, 2l]"),
    "ou_mean": ("noise.ou_mean", "OU mode mean vanishes within 5 standard errors"),
    "ou_variance": ("noise.ou_variance", "OU mode variance matches the closed form within 5 standard errors"),
    "zero_noise_additive": ("stopping.zero_noise", "z ≡ 0 gives the additive stopping time 1"),
    "zero_noise_multiplicative": ("stopping.zero_noise", "B ≡ 0 gives T_L = L"),
    "adapted_z": ("noise.adaptedness", "z and z_q before a cut do not see later increments"),
    "adapted_upsilon": ("noise.adaptedness", "Υ_l before a cut does not see later increments"),
    "flow_constant": ("transport.constant_drift", "constant drift flow matches x + c t"),
    "flow_order": ("transport.convergence_order", "RK4 observed order under step halving"),
    "flow_identity": ("transport.composition", "forward then backward flow returns to the start"),
    "flow_shear": ("transport.solve_flow", "composed flow matches x + (τ − t)(sin x₂, 0) under a steady shear"),
    "phase_modulus": ("transport.phase_modulus", "|ψ| ≡ 1"),
    "time_derivative_order": ("stress.time_derivative", "∂_t stencil is second order under dt halving (Richardson)"),
    "base_residual": ("stress.equation_residual", "base step solves the relaxed equation (additive)"),
}


@dataclass
class VerifyRow:
    key: str
    measured: float
    tolerance: float
    holds: bool
    anchor: str

    def to_dict(self) -> dict:
        return {"key": self.key, "measured": self.measured, "tolerance": self.tolerance, "holds": self.holds,
                "anchor": self.anchor, "description": CATALOGUE[self.key][1]}


@dataclass
class VerifyReport:
    N: int
    seed: int
    rows: List[VerifyRow] = field(default_factory=list)

    def add(self, key: str, measured: float, tolerance: float, holds: Optional[bool] = None) -> VerifyRow:
        measured = float(measured)
        ok = measured <= tolerance if holds is None else bool(holds)
        row = VerifyRow(key, measured, float(tolerance), bool(ok), CATALOGUE[key][0])
        self.rows.append(row)
        return row

    def failed(self) -> List[VerifyRow]:
        return [r for r in self.rows if not r.holds]

    @property
    def holds(self) -> bool:
        return not self.failed()

    def to_dict(self) -> dict:
        return {"N": self.N, "seed": self.seed, "holds": self.holds, "rows": [r.to_dict() for r in self.rows]}


def richardson_order(coarse: float, medium: float, fine: float) -> float:
    """Observed order log₂(|coarse − medium| / |medium − fine|) from three levels halving the step."""
    a, b = abs(coarse - medium), abs(medium - fine)
    if b == 0:
        return math.inf
    return math.log2(a / b)


def richardson_error(medium: float, fine: float, order: float) -> float:
    """Estimated error of the fine level: |medium − fine| / (2^p − 1)."""
    return abs(medium - fine) / (2 ** order - 1)


def _relative(a, b) -> float:
    scale = max(norm_sup(b), 1e-300)
    return norm_sup(a - b) / scale


def check_operators(report: VerifyReport, grids: Sequence[PeriodicGrid], rng: np.random.Generator,
                    count: int) -> None:
    """Worst relative defects of the operator identities over 'count' random fields on each grid."""
    worst = {"inverse_divergence": 0.0, "leray_idempotent": 0.0, "leray_gradients": 0.0,
             "fractional_inverse": 0.0, "sqg_identity": 0.0}
    for grid, _ in itertools.product(grids, range(count)):
        band = grid.dealias_radius
        f = random_vector(grid, 1, band, 0.0, rng)
        expected = leray_project(mean_free(f))
        worst["inverse_divergence"] = max(worst["inverse_divergence"],
                                          _relative(div_tensor(inverse_divergence(f)), expected))
        once = leray_project(f)
        worst["leray_idempotent"] = max(worst["leray_idempotent"], _relative(leray_project(once), once))
        g = grad(random_vector(grid, 1, band, 0.0, rng).component(0))
        worst["leray_gradients"] = max(worst["leray_gradients"], norm_sup(leray_project(g)) / max(norm_sup(g), 1e-300))
        h = mean_free(f)
        worst["fractional_inverse"] = max(worst["fractional_inverse"],
                                          _relative(frac_laplacian(frac_laplacian(h, 0.7), -0.7), h))
        v = leray_project(random_vector(grid, 1, band // 2, 0.0, rng))
        worst["sqg_identity"] = max(worst["sqg_identity"], _relative(sqg_nonlinearity(v), sqg_nonlinearity_expanded(v)))
    report.add("inverse_divergence", worst["inverse_divergence"], 1e-10)
    report.add("leray_idempotent", worst["leray_idempotent"], 1e-12)
    report.add("leray_gradients", worst["leray_gradients"], 1e-12)
    report.add("fractional_inverse", worst["fractional_inverse"], 1e-12)
    report.add("sqg_identity", worst["sqg_identity"], 1e-8)


def check_geometry(report: VerifyReport, geo: DirectionSystem, rng: np.random.Generator, count: int = 10_000) -> None:
    R = sample_ball(geo, count, rng)
    worst = 0.0
    for dset in (geo.gamma1, geo.gamma2):
        c = dset.coefficients(R[:, 0], R[:, 1], R[:, 2])
        rebuilt = np.zeros_like(R)
        for i, (a, b) in enumerate(dset.pairs):
            kp = (-float(b), float(a))
            # γ_k = γ_{−k}: the pair contributes twice with weight ½
            rebuilt[:, 0] += c[i] * kp[0] * kp[0]
            rebuilt[:, 1] += c[i] * kp[0] * kp[1]
            rebuilt[:, 2] += c[i] * kp[1] * kp[1]
        worst = max(worst, float(np.max(np.abs(rebuilt - R))))
    report.add("geometry_reconstruction", worst, 1e-12)
    exact = geo.gamma1.coefficients_exact(Fraction(1), Fraction(0), Fraction(1))
    report.add("geometry_identity_coefficients", 0.0 if exact == (Fraction(7, 16), Fraction(25, 32), Fraction(25, 32)) else 1.0,
               0.0)
    checks = lattice_checks(geo)
    report.add("geometry_lattice", float(sum(not v for v in checks.values())), 0.0)


def check_cutoffs(report: VerifyReport, sched: ParamSchedule, count: int = 10_000) -> None:
    family = cutoff_family(sched, 0, 0.0, 1.0)
    t = np.linspace(0.0, 1.0, count)
    report.add("cutoff_partition", family.partition_defect(t), 1e-12)
    report.add("cutoff_overlap", family.max_active(t), 2)
    tau = sched.tau_at(1)
    lags, weights = lag_weights(tau, tau / 8)
    defect = abs(weights.sum() - 1.0)
    inside = np.all(lags * tau / 8 > tau) and np.all(lags * tau / 8 <= 2 * tau * (1 + 1e-12))
    report.add("mollifier_one_sided", defect, 1e-14, holds=defect <= 1e-14 and inside and np.all(weights >= 0))


def check_ou(report: VerifyReport, sigma: float, eta: float, seed: int, paths: int = 10_000) -> None:
    modes = np.array([[1, 0], [0, 2], [2, 1], [3, 3], [4, 1]], dtype=float)
    g = noise_amplitudes(modes, sigma, eta)
    mu = ou_rate(modes, sigma)
    dt, samples = 0.01, (10, 50, 100)
    rng = np.random.default_rng([seed, 0x0E])
    raw = rng.standard_normal((max(samples), paths * len(modes), 2))
    xi = (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0)
    c = simulate_ou_modes(np.tile(g, paths), np.tile(mu, paths), dt, xi)
    worst_mean, worst_var = 0.0, 0.0
    for k in samples:
        ck = c[k].reshape(paths, len(modes))
        power = np.abs(ck) ** 2
        se_var = power.std(axis=0) / math.sqrt(paths)
        expected = ou_variance(g, mu, k * dt)
        worst_var = max(worst_var, float(np.max(np.abs(power.mean(axis=0) - expected) / se_var)))
        se_mean = np.sqrt(expected / 2 / paths)
        worst_mean = max(worst_mean, float(np.max(np.abs(ck.real.mean(axis=0)) / se_mean)))
    report.add("ou_mean", worst_mean, 5.0)
    report.add("ou_variance", worst_var, 5.0)


def check_stopping(report: VerifyReport, grid: PeriodicGrid, sched: ParamSchedule, geo: DirectionSystem,
                   sigma: float, eta: float, delta: float, L: float, seed: int) -> None:
    dt = 0.01
    noise = sample_noise(grid, sigma, eta, dt, 101, seed, amplitude=0.0, band=min(4.0, grid.dealias_radius))
    z = solve_stokes_z(noise, sigma)
    t = stopping_time_additive(z, sched, 1.0, 1.0, delta, geo.eps_gamma, 8.0, cap=1.0)
    report.add("zero_noise_additive", abs(t.value - 1.0), 0.0)
    B = ScalarPath(0, dt, np.zeros(int(math.ceil(L / dt)) + 1))
    report.add("zero_noise_multiplicative", abs(stopping_time_mult(B, L, delta).value - L), 1e-12)


def check_adaptedness(report: VerifyReport, grid: PeriodicGrid, sched: ParamSchedule, sigma: float, eta: float,
                      seed: int, steps: int = 200, cut: int = 120) -> None:
    noise = sample_noise(grid, sigma, eta, 0.01, steps, seed, band=min(6.0, grid.dealias_radius))
    cut_noise = noise.truncated_after(cut)
    z, z_cut = solve_stokes_z(noise, sigma), solve_stokes_z(cut_noise, sigma)
    f = sched.f_cut(1)
    same_z = np.array_equal(z.coeffs[:cut + 1], z_cut.coeffs[:cut + 1])
    same_zq = np.array_equal(z.truncate(f).coeffs[:cut + 1], z_cut.truncate(f).coeffs[:cut + 1])
    report.add("adapted_z", 0.0 if same_z and same_zq else 1.0, 0.0)
    width = 0.05
    ups = upsilon_paths(brownian_path(noise), width, 0, steps + 1).mollified
    ups_cut = upsilon_paths(brownian_path(cut_noise), width, 0, steps + 1).mollified
    same = np.array_equal(ups.values[:cut + 1 - ups.k0], ups_cut.values[:cut + 1 - ups_cut.k0])
    report.add("adapted_upsilon", 0.0 if same else 1.0, 0.0)


def _shear_drift(grid: PeriodicGrid, dt: float, count: int) -> DriftSampler:
    """Steady shear v = (sin x₂, 0) sampled as a compact series."""
    series = FieldSeries.zeros(VectorField, grid, 0, count, dt, 2)
    x1, x2 = grid.points
    v = VectorField.from_physical(grid, np.stack([np.sin(x2), np.zeros_like(x2)]))
    for k in range(count):
        series.set(k, v)
    return DriftSampler(series)


def check_transport(report: VerifyReport) -> None:
    grid = PeriodicGrid(32)
    x1, x2 = grid.points
    c = (0.3, -0.7)
    y1, y2 = integrate_characteristics(lambda t, a, b: (np.full_like(a, c[0]), np.full_like(b, c[1])),
                                       0.0, 0.8, x1, x2, 7)
    report.add("flow_constant", float(max(np.max(np.abs(y1 - x1 - 0.8 * c[0])), np.max(np.abs(y2 - x2 - 0.8 * c[1])))),
               1e-10)

    def swirl(t, a, b):
        return np.sin(b) * np.cos(t), np.cos(a) + 0.5 * np.sin(t)

    orders = convergence_order(swirl, 0.0, 1.0, x1[::4, ::4], x2[::4, ::4], [8, 16, 32])
    report.add("flow_order", 4.0 - min(orders), 0.5)
    report.add("flow_identity", identity_defect(swirl, 0.0, 0.5, grid, 64), 1e-6)
    dt = 0.01
    drift = _shear_drift(grid, dt, 40)
    flow = solve_flow(drift, 0, 0.2, list(range(15, 26)), grid)
    exact = (0.2 - flow.ks[:, None, None] * dt) * np.sin(x2)
    report.add("flow_shear", float(max(np.max(np.abs(flow.displacement[:, 0] - exact)),
                                       np.max(np.abs(flow.displacement[:, 1])))), 1e-10)
    worst = 0.0
    for k in flow.ks:
        psi = phase(flow, (0.6, 0.8), 5.0, int(k), grid).values()
        worst = max(worst, float(np.max(np.abs(np.abs(psi) - 1.0))))
    report.add("phase_modulus", worst, 1e-12)


def check_time_derivative(report: VerifyReport) -> None:
    grid = PeriodicGrid(16)
    base = VectorField.from_physical(grid, np.stack([np.cos(grid.points[1]), np.zeros((16, 16))]))
    values = []
    for dt in (0.04, 0.02, 0.01):
        count = int(round(0.4 / dt)) + 1
        series = FieldSeries.from_fields([base * math.sin(1.0 + k * dt) for k in range(count)], 0, dt, radius=2)
        middle = int(round(0.2 / dt))
        # first-mode amplitude of ∂_t y at t = 1.2
        values.append(float(time_derivative(series).field(middle).coeffs[0, 0, 1].real))
    order = richardson_order(*values)
    report.add("time_derivative_order", max(0.0, 2.0 - order), 0.2)


def check_base_residual(report: VerifyReport, grid: PeriodicGrid, sched: ParamSchedule, sigma: float, eta: float,
                        seed: int, tolerance: float) -> None:
    dt = 1e-3
    noise = sample_noise(grid, sigma, eta, dt, 24, seed, band=min(sched.f_cut(0) + 2, grid.dealias_radius))
    z = solve_stokes_z(noise, sigma)
    ctx = NoiseContext(mode=Mode.ADDITIVE, dt=dt, sigma=sigma, z=z)
    state = base_step(Mode.ADDITIVE, ctx, sched, grid, 1, 20)
    res = residual(state.y, state.R, Mode.ADDITIVE, sched.gamma, sigma, z=state.z_series(), p=state.p)
    report.add("base_residual", res.relative, tolerance)


def run_verify(config: RunConfig, logger=None) -> VerifyReport:
    """
    Run the invariant suite for a configuration without a production run.

    Raises:
        ConfigError: If the grid is invalid.
        BandExceedsGrid: If the first perturbation band does not fit the grid.
    """
    s = config.schedule
    sched = build_schedule(s.a, s.b, s.beta, s.alpha, s.gamma, s.sigma, max(s.Q, 1), s.L, logger)
    grid = PeriodicGrid(config.grid.N, config.workers)
    grid.require_band(9 * sched.lam_at(1) / 8, what="first perturbation band")
    report = VerifyReport(N=grid.N, seed=config.seed)
    report.add("band_fits", 9 * sched.lam_at(1) / 8, grid.dealias_radius)
    rng = np.random.default_rng([config.seed, 0x7E5])
    geo = build_direction_system()
    steps: Sequence[Callable[[], None]] = (
        lambda: check_operators(report, [PeriodicGrid(n, config.workers) for n in OPERATOR_GRIDS], rng, OPERATOR_FIELDS),
        lambda: check_geometry(report, geo, rng),
        lambda: check_cutoffs(report, sched),
        lambda: check_ou(report, s.sigma, config.noise.eta, config.seed),
        lambda: check_stopping(report, grid, sched, geo, s.sigma, config.noise.eta, config.noise.delta, s.L, config.seed),
        lambda: check_adaptedness(report, grid, sched, s.sigma, config.noise.eta, config.seed),
        lambda: check_transport(report),
        lambda: check_time_derivative(report),
        lambda: check_base_residual(report, grid, sched, s.sigma, config.noise.eta, config.seed,
                                    config.tolerances.residual),
    )
    for step in steps:
        step()
    if logger:
        for row in report.failed():
            logger.warning(f"Invariant failed: {row.key} measured {row.measured:.3e} (tolerance {row.tolerance:.1e})")
        logger.info(f"Verify: {len(report.rows) - len(report.failed())}/{len(report.rows)} invariants hold")
    return report

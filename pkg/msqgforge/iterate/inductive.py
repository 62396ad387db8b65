# iterate/inductive.py

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..errors import MissingTimeHalo
from ..params import Mode, stage_factors
from ..spectral.fields import FieldSeries, ScalarPath, VectorField
from ..spectral.norms import norm_c1, norm_sup, series_hs_sq
from ..spectral.operators import advect, frac_laplacian
from ..transport import DriftSampler
from .state import IterationState

TWO_PI_SQ = (2 * np.pi) ** 2
ENERGY_LOW = 0.75
ENERGY_HIGH = 1.25
SUPPORT_TOLERANCE = 1e-20


@dataclass
class InductiveRow:
    """One hypothesis: measured left side against its bound."""
    id: str
    measured: float
    bound: float
    holds: bool
    anchor: str

    @property
    def ratio(self) -> float:
        if self.bound == 0:
            return 0.0 if self.measured == 0 else math.inf
        return self.measured / self.bound

    def to_dict(self) -> dict:
        return {"id": self.id, "measured": self.measured, "bound": self.bound, "ratio": self.ratio,
                "holds": self.holds, "anchor": self.anchor}


@dataclass
class InductiveReport:
    q: int
    mode: Mode
    k_start: int
    k_stop: int
    rows: List[InductiveRow] = field(default_factory=list)

    def add(self, id: str, measured: float, bound: float, anchor: str, holds: Optional[bool] = None) -> InductiveRow:
        measured, bound = float(measured), float(bound)
        row = InductiveRow(id, measured, bound, bool(measured <= bound) if holds is None else bool(holds), anchor)
        self.rows.append(row)
        return row

    def row(self, id: str) -> InductiveRow:
        for r in self.rows:
            if r.id == id:
                return r
        raise KeyError(id)

    def failed(self) -> List[InductiveRow]:
        return [r for r in self.rows if not r.holds]

    @property
    def holds(self) -> bool:
        return not self.failed()

    def to_dict(self) -> dict:
        return {"q": self.q, "mode": self.mode.value, "k_start": self.k_start, "k_stop": self.k_stop,
                "holds": self.holds, "rows": [r.to_dict() for r in self.rows]}


def mass_outside_ball(series: FieldSeries, radius: float) -> float:
    """Largest per-sample Σ|f̂(m)|² over box modes with |m| > radius."""
    if len(series) == 0:
        return 0.0
    if series.radius is None:
        modulus = series.grid.modulus
    else:
        modes = series.grid.box_modes(series.radius)
        modulus = np.hypot(modes[:, None], modes[None, :])
    outside = modulus > radius
    axes = tuple(range(1, series.data.ndim))
    return float(np.max(np.sum(np.abs(series.data * outside) ** 2, axis=axes)))


def _total_mass(series: FieldSeries) -> float:
    if len(series) == 0:
        return 0.0
    axes = tuple(range(1, series.data.ndim))
    return float(np.max(np.sum(np.abs(series.data) ** 2, axis=axes)))


def material_derivative(state: IterationState, drift: Optional[DriftSampler] = None) -> np.ndarray:
    """
    sup_x |(∂_t + U·∇)y_q| at every sample.

    U is the transport velocity of the step that produced y_q when 'drift'
    is given, else Λ(y_q + z_q) (additive) or ΥΛy_q (multiplicative).

    Raises:
        MissingTimeHalo: If the state holds fewer than three samples.
    """
    y = state.y
    if len(y) < 3:
        raise MissingTimeHalo(f"∂_t y needs at least 3 samples, stage {state.q} has {len(y)}")
    dydt = y.with_data(y.k0, np.gradient(y.data, y.dt, axis=0, edge_order=2))
    z = state.z_series(y.radius) if state.mode is Mode.ADDITIVE else None
    upsilon = state.noise.upsilon_values(y.k0, y.k1) if state.mode is Mode.MULTIPLICATIVE else None
    out = np.zeros(len(y))
    for i, k in enumerate(y.indices()):
        yk = y.field(k)
        if drift is not None and drift.covers(k * y.dt, k * y.dt):
            U = VectorField(state.grid, drift.series.expand(drift.box_at(k * y.dt)))
        elif z is not None:
            U = frac_laplacian(yk + z.field(k), 1.0)
        else:
            U = frac_laplacian(yk, 1.0) * (1.0 if upsilon is None else float(upsilon[i]))
        out[i] = norm_sup(dydt.field(k) + advect(U, yk))
    return out


def check_inductive(state: IterationState, profile, M0: float, e_bar: float, eps_gamma: float,
                    previous: Optional[IterationState] = None, drift: Optional[DriftSampler] = None,
                    upsilon_l: Optional[ScalarPath] = None) -> InductiveReport:
    """
    Evaluate the inductive hypotheses of stage q on every sample of the state.

    Args:
        state: The stage-q iterate.
        profile: Prescribed energy e(t).
        M0: Amplitude constant.
        e_bar: sup e over the construction horizon.
        eps_gamma: Positivity radius of the direction system.
        previous: Stage q−1 iterate; adds the Cauchy difference row.
        drift: Transport velocity of the step q−1 → q for the material derivative.
        upsilon_l: Mollified Υ for the multiplicative Cauchy bound.

    Returns:
        An InductiveReport with every row filled; failures are reported, not raised.
    """
    sched = state.schedule
    q = state.q
    factors = stage_factors(state.mode, sched.L)
    report = InductiveReport(q=q, mode=state.mode, k_start=state.k_start, k_stop=state.k_stop)
    e = np.asarray(profile.value(state.times()), dtype=float)
    root_M0, root_e = math.sqrt(M0), math.sqrt(e_bar)
    lam_q = sched.lam_at(q)
    delta_q = sched.delta_at(q)

    outside = mass_outside_ball(state.y, 2 * lam_q)
    report.add("support_y", outside, 0.0, "inductive.support_velocity")
    r_outside = mass_outside_ball(state.R, 4 * lam_q)
    r_total = _total_mass(state.R)
    report.add("support_R", r_outside, SUPPORT_TOLERANCE * r_total, "inductive.support_stress",
               holds=r_outside <= SUPPORT_TOLERANCE * r_total)

    sizes = np.array([norm_sup(f) for f in state.y.fields()])
    growth = 1.0 + sum(math.sqrt(sched.delta_at(j)) for j in range(1, q + 1))
    report.add("size", sizes.max(initial=0.0), root_M0 * growth * root_e * factors["size"], "inductive.size")

    c1 = np.array([norm_c1(f) + norm_sup(frac_laplacian(f, 1.0)) for f in state.y.fields()])
    report.add("derivative", c1.max(initial=0.0), root_M0 * lam_q * math.sqrt(delta_q) * root_e * factors["size"],
               "inductive.derivative")

    if len(state.y) >= 3:
        material = material_derivative(state, drift)
        report.add("material", material.max(), M0 * lam_q ** 2 * delta_q * e_bar * factors["material"],
                   "inductive.material_derivative")

    stress = np.array([norm_sup(f) for f in state.R.fields()])
    target = eps_gamma / (32 * TWO_PI_SQ) * sched.lam_delta(q + 2) * e * factors["stress"]
    report.add("stress", float(np.max(stress / target)) if len(stress) else 0.0, 1.0, "inductive.stress")

    gap = e - state.solution_energy()
    window = sched.lam_delta(q + 1) * e
    lower = float(np.min(gap / window)) if len(gap) else ENERGY_LOW
    upper = float(np.max(gap / window)) if len(gap) else ENERGY_HIGH
    report.add("energy_low", ENERGY_LOW, lower, "inductive.energy_window")
    report.add("energy_high", upper, ENERGY_HIGH, "inductive.energy_window")

    if previous is not None:
        k_lo, k_hi = max(state.k_start, previous.k_start), min(state.k_stop, previous.k_stop)
        if k_hi > k_lo:
            now = state.y.window(k_lo, k_hi)
            before = previous.y.window(k_lo, k_hi)
            bound = root_M0 * root_e * math.sqrt(delta_q) * factors["cauchy"]
            if state.mode is Mode.MULTIPLICATIVE:
                weights = (upsilon_l.values[k_lo - upsilon_l.k0:k_hi - upsilon_l.k0] if upsilon_l is not None
                           else state.noise.upsilon_values(k_lo, k_hi)) ** -0.5
            else:
                weights = np.ones(k_hi - k_lo)
            worst = 0.0
            for i, k in enumerate(range(k_lo, k_hi)):
                diff = VectorField(state.grid, now.coeffs_at(k) - before.coeffs_at(k))
                worst = max(worst, norm_sup(diff) / (bound * weights[i]))
            report.add("cauchy", worst, 1.0, "inductive.cauchy_difference")
    return report


def energy_defect(state: IterationState, profile) -> np.ndarray:
    """|e(1 − λ_{q+1}δ_{q+1}) − ‖v_q‖²| / (λ_{q+1}δ_{q+1}e) per sample; at most 1/4 after energy control."""
    e = np.asarray(profile.value(state.times()), dtype=float)
    lam_delta = state.schedule.lam_delta(state.q + 1)
    return np.abs(e * (1 - lam_delta) - state.solution_energy()) / (lam_delta * e)


def hs_split(y_l: FieldSeries, w: FieldSeries) -> float:
    """Largest relative |‖y_l + w‖² − ‖y_l‖² − ‖w‖²| in Ḣ^{1/2}; zero when the spectra are disjoint."""
    radius = max(y_l.radius or 0, w.radius or 0)
    a, b = y_l.rebox(radius), w.rebox(radius)
    total = series_hs_sq(a.with_data(a.k0, a.data + b.data), 0.5)
    parts = series_hs_sq(a, 0.5) + series_hs_sq(b, 0.5)
    scale = np.maximum(parts, 1e-300)
    return float(np.max(np.abs(total - parts) / scale)) if len(total) else 0.0

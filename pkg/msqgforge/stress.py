# stress.py

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .errors import MissingTimeHalo
from .params import Mode
from .spectral.fields import FieldSeries, SymTFField, VectorField
from .spectral.grid import PeriodicGrid
from .spectral.norms import norm_sup
from .spectral.operators import (
    advect,
    div_tensor,
    frac_laplacian,
    grad_transpose,
    inverse_divergence,
    leray_project,
    mean_free,
    perp_curl,
    pressure_poisson,
)

COMPONENTS = ("transport", "nash", "linear", "oscillation", "commutator1", "commutator2")


@dataclass
class StressInputs:
    """
    Fields of one step q → q+1 on the new window [k_start, k_stop).

    Additive runs carry z_l, z_q and z_{q+1}; multiplicative runs carry the
    exact Υ and mollified Υ_l values per sample. N_l is the mollified
    nonlinearity of stage q: [N(y_q + z_q)]_l or [ΥN(y_q)]_l.
    """
    mode: Mode
    gamma: float
    sigma: float
    w: FieldSeries
    y_l: FieldSeries
    R_l: FieldSeries
    N_l: FieldSeries
    z_l: Optional[FieldSeries] = None
    z_q: Optional[FieldSeries] = None
    z_next: Optional[FieldSeries] = None
    upsilon: Optional[np.ndarray] = None
    upsilon_l: Optional[np.ndarray] = None

    @property
    def k_start(self) -> int:
        return self.w.k0

    @property
    def k_stop(self) -> int:
        return self.w.k1

    @property
    def grid(self) -> PeriodicGrid:
        return self.w.grid


@dataclass
class StressBreakdown:
    """R̊_{q+1} with the sup norm of every component per sample."""
    q: int
    total: FieldSeries
    sups: Dict[str, np.ndarray]
    target: np.ndarray
    outside_ball: float
    truncated: float
    components: Optional[Dict[str, FieldSeries]] = None

    @property
    def ratio(self) -> float:
        sups = np.array([norm_sup(f) for f in self.total.fields()])
        return float(np.max(sups / self.target)) if len(sups) else 0.0

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "components": {name: float(np.max(v)) if len(v) else 0.0 for name, v in self.sups.items()},
            "total": float(np.max(self.sups["total"])) if len(self.sups["total"]) else 0.0,
            "target_min": float(np.min(self.target)) if len(self.target) else None,
            "ratio": self.ratio,
            "outside_ball": self.outside_ball,
            "truncated": self.truncated,
            "anchor": "stress.decomposition",
        }


def time_derivative(series: FieldSeries) -> FieldSeries:
    """
    Second-order ∂_t on the sample grid, one-sided at both ends.

    Raises:
        MissingTimeHalo: With fewer than three samples.
    """
    if len(series) < 3:
        raise MissingTimeHalo(f"∂_t needs at least 3 samples, series has {len(series)}")
    return series.with_data(series.k0, np.gradient(series.data, series.dt, axis=0, edge_order=2))


def _lam(f: VectorField) -> VectorField:
    return frac_laplacian(f, 1.0)


def _additive_parts(inp: StressInputs, k: int, wk: VectorField, dwdt: VectorField) -> Dict[str, VectorField]:
    yl = inp.y_l.field(k)
    zl = inp.z_l.field(k)
    zq = inp.z_q.field(k)
    z1 = inp.z_next.field(k)
    s = 1.5 - 2 * inp.sigma
    y1 = yl + wk
    e = z1 - zl
    d1 = z1 - zq
    return {
        "transport": dwdt + _transport_term(yl + zl, wk),
        "nash": grad_transpose(_lam(yl + zq), wk) + perp_curl(wk, yl),
        "linear": (frac_laplacian(wk, inp.gamma) - frac_laplacian(zl, inp.gamma) + frac_laplacian(zl, s)
                   + frac_laplacian(z1, inp.gamma) - frac_laplacian(z1, s) + perp_curl(wk, zl)),
        "oscillation": perp_curl(wk, wk),
        "commutator1": perp_curl(yl + zl, yl + zl) - inp.N_l.field(k),
        "commutator2": (perp_curl(y1 + z1, y1 + z1) - perp_curl(y1 + zl, y1 + zl)
                        + grad_transpose(wk, _lam(e)) + grad_transpose(_lam(d1), wk)),
    }


def _multiplicative_parts(inp: StressInputs, k: int, wk: VectorField, dwdt: VectorField) -> Dict[str, VectorField]:
    i = k - inp.k_start
    ups, ups_l = float(inp.upsilon[i]), float(inp.upsilon_l[i])
    yl = inp.y_l.field(k)
    y1 = yl + wk
    return {
        "transport": dwdt + ups_l * _transport_term(yl, wk),
        "nash": ups_l * (grad_transpose(_lam(yl), wk) + perp_curl(wk, yl)),
        "linear": frac_laplacian(wk, inp.gamma) + 0.5 * wk,
        "oscillation": ups_l * perp_curl(wk, wk),
        "commutator1": ups_l * perp_curl(yl, yl) - inp.N_l.field(k),
        "commutator2": (ups - ups_l) * perp_curl(y1, y1),
    }


def _transport_term(a: VectorField, b: VectorField) -> VectorField:
    """(Λa·∇)b, dealiased."""
    return advect(_lam(a), b)


def assemble_stress(inp: StressInputs, q: int, target: np.ndarray, radius: Optional[int] = None,
                    keep_components: bool = False, ball: Optional[float] = None) -> StressBreakdown:
    """
    R̊_{q+1} = R_T + R_N + R_L + R_O + R_Com1 + R_Com2 on [k_start, k_stop).

    Each component is ℬ applied to a dealiased vector field; R̊_l enters
    the oscillation component unchanged. R_Com2 is taken in the telescoped
    form N(y_{q+1} + z_{q+1}) − N(y_{q+1} + z_l) + (∇w)^TΛ(z_{q+1} − z_l)
    + (∇Λ(z_{q+1} − z_q))^T w, which agrees with the term-by-term sum modulo
    gradients.

    Args:
        inp: Step fields on the new window.
        q: The stage being left.
        target: Bound of the stress hypothesis at stage q+1 per sample.
        radius: Storage box of the total; None keeps the full grid.
        keep_components: Also store every component series.
        ball: Radius whose outside mass is reported (4λ_{q+1}).

    Raises:
        MissingTimeHalo: If the window holds fewer than three samples.
    """
    grid = inp.grid
    dwdt_series = time_derivative(inp.w)
    count = inp.k_stop - inp.k_start
    total = FieldSeries.zeros(SymTFField, grid, inp.k_start, count, inp.w.dt, radius)
    kept = {name: FieldSeries.zeros(SymTFField, grid, inp.k_start, count, inp.w.dt, radius)
            for name in COMPONENTS} if keep_components else None
    sups = {name: np.zeros(count) for name in COMPONENTS + ("total",)}
    outside, truncated = 0.0, 0.0
    parts_of = _additive_parts if inp.mode is Mode.ADDITIVE else _multiplicative_parts
    for i, k in enumerate(range(inp.k_start, inp.k_stop)):
        wk = inp.w.field(k)
        parts = parts_of(inp, k, wk, dwdt_series.field(k))
        acc = SymTFField.zeros(grid)
        for name in COMPONENTS:
            Rk = inverse_divergence(parts[name])
            if name == "oscillation":
                Rk = inp.R_l.field(k) + Rk
            acc = acc + Rk
            sups[name][i] = norm_sup(Rk)
            if kept is not None:
                kept[name].set(k, Rk)
        sups["total"][i] = norm_sup(acc)
        if ball is not None:
            far = grid.modulus > ball
            outside = max(outside, float(np.sum(np.abs(acc.coeffs[..., far]) ** 2)))
        total.set(k, acc)
        stored = np.sum(np.abs(total.data[i]) ** 2)
        truncated = max(truncated, float(np.sum(np.abs(acc.coeffs) ** 2) - stored))
    return StressBreakdown(q=q, total=total, sups=sups, target=np.asarray(target, dtype=float),
                           outside_ball=outside, truncated=max(truncated, 0.0), components=kept)


@dataclass
class ResidualReport:
    """Leray-projected defect of the relaxed equation at interior samples."""
    relative: float
    absolute: float
    scale: float
    pressure_defect: Optional[float]
    samples: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"relative": self.relative, "absolute": self.absolute, "scale": self.scale,
                "pressure_defect": self.pressure_defect, "samples": len(self.samples),
                "anchor": "stress.equation_residual"}


def equation_terms(mode: Mode, y: VectorField, dydt: VectorField, gamma: float, sigma: float,
                   z: Optional[VectorField] = None, upsilon: float = 1.0) -> List[VectorField]:
    """Every non-pressure term of the relaxed equation except div R̊."""
    if Mode(mode) is Mode.ADDITIVE:
        v = y if z is None else y + z
        terms = [dydt, perp_curl(v, v), frac_laplacian(y, gamma)]
        if z is not None:
            s = 1.5 - 2 * sigma
            terms += [frac_laplacian(z, gamma), -frac_laplacian(z, s)]
        return terms
    return [dydt, 0.5 * y, upsilon * perp_curl(y, y), frac_laplacian(y, gamma)]


def residual(y: FieldSeries, R: FieldSeries, mode: Mode, gamma: float, sigma: float,
             z: Optional[FieldSeries] = None, upsilon: Optional[np.ndarray] = None,
             p: Optional[FieldSeries] = None) -> ResidualReport:
    """
    sup_k ‖ℙ(F(t_k) − div R̊(t_k))‖_∞ relative to the sum of the term sups,
    over interior samples, where F collects ∂_t y, the nonlinearity, the
    dissipation and the noise terms.

    The pressure is recovered from Δp = div(div R̊ − F) and compared with
    'p' when given.

    Raises:
        MissingTimeHalo: With fewer than three samples.
    """
    mode = Mode(mode)
    dydt = time_derivative(y)
    ks = list(range(y.k0 + 1, y.k1 - 1))
    worst, scale, p_worst = 0.0, 0.0, None
    for k in ks:
        yk = y.field(k)
        zk = z.field(k) if z is not None else None
        ups = 1.0 if upsilon is None else float(upsilon[k - y.k0])
        terms = equation_terms(mode, yk, dydt.field(k), gamma, sigma, zk, ups)
        divR = div_tensor(R.field(k))
        F = terms[0]
        for t in terms[1:]:
            F = F + t
        defect = mean_free(leray_project(F - divR))
        worst = max(worst, norm_sup(defect))
        scale = max(scale, sum(norm_sup(t) for t in terms) + norm_sup(divR))
        if p is not None:
            solved = pressure_poisson(divR - F)
            diff = mean_free(p.field(k) - solved)
            size = max(norm_sup(mean_free(solved)), 1e-300)
            p_worst = max(p_worst or 0.0, norm_sup(diff) / size)
    relative = worst / scale if scale > 0 else 0.0
    return ResidualReport(relative=relative, absolute=worst, scale=scale, pressure_defect=p_worst, samples=ks)

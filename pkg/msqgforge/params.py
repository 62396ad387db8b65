# params.py

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional

from .errors import ConfigError, GeometryUnavailable, NonPositiveBase, ZeroStages

OVERFLOW = 1e300
LOG_OVERFLOW = math.log(OVERFLOW)


class Mode(str, Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"


class Regime(str, Enum):
    THEORETICAL = "theoretical"
    DEMONSTRATION = "demonstration"


@dataclass(frozen=True)
class DualValue:
    """A parameter stored as (log, float); 'value' is +inf when it passes 1e300."""
    log: float
    value: float

    @property
    def overflow(self) -> bool:
        return math.isinf(self.value)

    @classmethod
    def from_log(cls, log: float) -> "DualValue":
        return cls(log, math.exp(log) if log <= LOG_OVERFLOW else math.inf)

    def to_dict(self) -> dict:
        return {"log": self.log, "value": None if self.overflow else self.value, "overflow": self.overflow}


@dataclass(frozen=True)
class ParamSchedule:
    """
    Geometric parameters for stages q = 0..Q+3.

    lam[q] = a^{b^q}, delta[q] = lam[1]^{2β−1} lam[q]^{−2β}, ell[q] = lam[q]^{−α}
    (the step q → q+1 mollifies at ell[q+1]), tau[q] for 1 <= q <= Q+2 is the
    slice width of the step q−1 → q, t_start[q] = −2 + Σ_{1<=ι<=q} delta[ι]^{1/2}.
    """
    a: int
    b: int
    beta: float
    alpha: float
    gamma: float
    sigma: float
    Q: int
    L: Optional[float]
    lam: List[DualValue]
    delta: List[DualValue]
    ell: List[DualValue]
    tau: List[Optional[DualValue]]
    t_start: List[float]
    M0: Optional[float] = None

    @property
    def size(self) -> int:
        return self.Q + 4

    def lam_at(self, q: int) -> float:
        return self.lam[q].value

    def delta_at(self, q: int) -> float:
        return self.delta[q].value

    def ell_at(self, q: int) -> float:
        return self.ell[q].value

    def tau_at(self, q: int) -> float:
        if self.tau[q] is None:
            raise IndexError(f"tau is not defined at q={q}")
        return self.tau[q].value

    def f_cut(self, q: int) -> float:
        """Noise truncation radius λ_q/4."""
        return self.lam[q].value / 4.0

    def lam_delta(self, q: int) -> float:
        """λ_q δ_q computed in log space."""
        return math.exp(self.lam[q].log + self.delta[q].log)

    def with_M0(self, M0: float) -> "ParamSchedule":
        return replace(self, M0=M0)

    def to_dict(self) -> dict:
        return {
            "inputs": {
                "a": self.a, "b": self.b, "beta": self.beta, "alpha": self.alpha,
                "gamma": self.gamma, "sigma": self.sigma, "Q": self.Q, "L": self.L,
            },
            "lambda": [v.to_dict() for v in self.lam],
            "delta": [v.to_dict() for v in self.delta],
            "ell": [v.to_dict() for v in self.ell],
            "tau": [None if v is None else v.to_dict() for v in self.tau],
            "t_start": list(self.t_start),
            "f_cut": [self.f_cut(q) for q in range(self.size)],
            "M0": self.M0,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ParamSchedule":
        inputs = data["inputs"]
        schedule = build_schedule(inputs["a"], inputs["b"], inputs["beta"], inputs["alpha"],
                                  inputs["gamma"], inputs["sigma"], inputs["Q"], inputs.get("L"))
        if data.get("M0") is not None:
            schedule = schedule.with_M0(data["M0"])
        return schedule


def _log_lambda(a: int, b: int, q: int) -> float:
    return (b ** q) * math.log(a)


def _lambda_value(a: int, b: int, q: int, log: float) -> float:
    if log > LOG_OVERFLOW:
        return math.inf
    return float(a ** (b ** q))


def build_schedule(a: int, b: int, beta: float, alpha: float, gamma: float, sigma: float,
                   Q: int, L: Optional[float] = None, logger=None) -> ParamSchedule:
    """
    Populate λ, δ, ℓ, τ and t_start for q = 0..Q+3.

    Parameters outside their admissible ranges are accepted with a warning;
    check_admissibility reports them.

    Raises:
        NonPositiveBase: If a < 2 or b < 2.
        ZeroStages: If Q < 1.
    """
    if a < 2 or b < 2:
        raise NonPositiveBase(f"a and b must be at least 2, got a={a}, b={b}")
    if Q < 1:
        raise ZeroStages(f"Q must be at least 1, got {Q}")
    if L is not None and L <= 1:
        raise ConfigError(f"L must exceed 1, got {L}")
    for name, value, low, high in (("beta", beta, 0.5, 0.75), ("alpha", alpha, 1.0, 1.5), ("gamma", gamma, 0.0, 1.5)):
        if not low < value < high and logger:
            logger.warning(f"{name}={value} lies outside ({low}, {high})")

    size = Q + 4
    log_lam = [_log_lambda(a, b, q) for q in range(size)]
    lam = [DualValue(log_lam[q], _lambda_value(a, b, q, log_lam[q])) for q in range(size)]
    L1 = log_lam[1]
    delta = []
    for q in range(size):
        log_d = 2 * beta * (L1 - log_lam[q]) - L1
        value = 1.0 / lam[1].value if q == 1 else DualValue.from_log(log_d).value
        delta.append(DualValue(log_d, value))
    ell = [DualValue.from_log(-alpha * log_lam[q]) for q in range(size)]

    tau: List[Optional[DualValue]] = [None] * size
    for q in range(1, size - 1):
        log_inv = (0.5 * alpha * log_lam[q] + 0.5 * (log_lam[q + 1] + delta[q + 1].log)
                   + 0.5 * log_lam[q] - 0.25 * delta[q].log)
        tau[q] = DualValue.from_log(-log_inv)

    t_start = []
    total = 0.0
    for q in range(size):
        if q >= 1:
            total += math.exp(0.5 * delta[q].log)
        t_start.append(-2.0 + total)

    schedule = ParamSchedule(a=a, b=b, beta=beta, alpha=alpha, gamma=gamma, sigma=sigma, Q=Q, L=L,
                             lam=lam, delta=delta, ell=ell, tau=tau, t_start=t_start)
    if logger:
        logger.info(f"Schedule built: a={a}, b={b}, Q={Q}, lambda_Q={lam[Q].value:g}")
    return schedule


@dataclass
class AdmissibilityCheck:
    name: str
    inequality: str
    holds: bool
    slack: float
    anchor: str

    def to_dict(self) -> dict:
        return {"name": self.name, "inequality": self.inequality, "holds": self.holds,
                "slack": self.slack, "anchor": self.anchor}


@dataclass
class RegimeReport:
    regime: Regime
    checks: List[AdmissibilityCheck] = field(default_factory=list)

    def failed(self) -> List[AdmissibilityCheck]:
        return [c for c in self.checks if not c.holds]

    def to_dict(self) -> dict:
        return {"regime": self.regime.value, "checks": [c.to_dict() for c in self.checks]}


def check_admissibility(s: ParamSchedule, mode: Mode) -> RegimeReport:
    """Evaluate every admissibility inequality in log space; the regime is theoretical iff all hold."""
    mode = Mode(mode)
    checks: List[AdmissibilityCheck] = []

    def add(name, inequality, slack, anchor, strict=True):
        holds = slack > 0 if strict else slack >= 0
        checks.append(AdmissibilityCheck(name, inequality, bool(holds), float(slack), anchor))

    add("beta", "1/2 < beta < 3/4", min(s.beta - 0.5, 0.75 - s.beta), "schedule.beta_range")
    add("a_large", "a >= e^16", math.log(s.a) - 16.0, "schedule.base_size", strict=False)
    add("a_lattice", "5 divides a", 1.0 if s.a % 5 == 0 else -float(s.a % 5), "geometry.lattice_frequencies")
    add("alpha", "1 < alpha < 3/2", min(s.alpha - 1.0, 1.5 - s.alpha), "schedule.alpha_range")
    add("gamma", "0 < gamma < 3/2", min(s.gamma, 1.5 - s.gamma), "equation.dissipation_range")
    if mode is Mode.ADDITIVE:
        if s.sigma <= 0:
            add("sigma", "0 < sigma <= (3/2 - gamma)/2", s.sigma, "noise.sigma_range")
        else:
            add("sigma", "0 < sigma <= (3/2 - gamma)/2", 0.5 * (1.5 - s.gamma) - s.sigma, "noise.sigma_range",
                strict=False)
        bound = 6.0 / (s.alpha - 0.5)
        add("b_additive", "b > 6/(alpha - 1/2)", s.b - bound, "schedule.exponent_additive")
    else:
        L = s.L if s.L is not None else 1.0
        bound = max(6 * L / (s.alpha - 0.5), 4 * L / (3 - 2 * s.alpha), L / (1.5 - s.gamma))
        add("b_multiplicative", "b > max(6L/(alpha-1/2), 4L/(3-2alpha), L/(3/2-gamma))", s.b - bound,
            "schedule.exponent_multiplicative")
    worst = min(s.b ** (q + 1) * (2 * s.beta - 1) * (s.b - 1) * math.log(s.a) for q in range(s.Q + 1))
    add("growth", "a^(b^(q+1)(2beta-1)(b-1)) >= 4/3 for q <= Q", worst - math.log(4.0 / 3.0),
        "schedule.energy_growth", strict=False)
    add("t_start", "t_start[Q+3] < 0", -s.t_start[-1], "schedule.stage_start")
    regime = Regime.THEORETICAL if all(c.holds for c in checks) else Regime.DEMONSTRATION
    return RegimeReport(regime=regime, checks=checks)


def m0_bound(sup_gamma: float, C1: float) -> float:
    """Smallest M₀ with M₀^{1/2} >= (4C₁/π) sup γ."""
    return (4.0 * C1 / math.pi * sup_gamma) ** 2


def compute_M0(geo, C1: float, samples: int = 10_000, seed: int = 0) -> float:
    """
    M₀ from the projector bound C₁ and sup γ_k over a dense sample of B(Id, ε_γ).

    Raises:
        GeometryUnavailable: If no direction system is supplied.
        ConfigError: If C₁ < 1.
    """
    from .geometry import max_gamma

    if geo is None:
        raise GeometryUnavailable("compute_M0 needs a built direction system")
    if C1 < 1:
        raise ConfigError(f"C1 must be at least 1, got {C1}")
    return m0_bound(max_gamma(geo, samples, seed), C1)


def m_L(L: float) -> float:
    """√3 L^{1/4} e^{L^{1/4}/2}."""
    r = L ** 0.25
    return math.sqrt(3.0) * r * math.exp(r / 2.0)


def stage_factors(mode: Mode, L: Optional[float]) -> Dict[str, float]:
    """Multipliers applied to the additive inductive bounds in multiplicative mode."""
    if Mode(mode) is Mode.ADDITIVE or L is None:
        return {"size": 1.0, "material": 1.0, "stress": 1.0, "cauchy": 1.0}
    mL = m_L(L)
    r = L ** 0.25
    return {"size": mL ** 4, "material": mL ** 8 * math.exp(r), "stress": math.exp(-3 * r),
            "cauchy": math.exp(1.5 * r)}

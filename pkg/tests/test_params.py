# test_params.py

import math
from unittest.mock import Mock

import pytest

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from msqgforge.errors import ConfigError, NonPositiveBase, ZeroStages
from msqgforge.params import (
    DualValue,
    Mode,
    Regime,
    build_schedule,
    check_admissibility,
    m_L,
    m0_bound,
    stage_factors,
)


class TestSchedule:
    """λ, δ, ℓ, τ and stage starts."""

    def setup_method(self):
        self.logger = Mock()
        self.sched = build_schedule(5, 2, 0.51, 1.25, 1.0, 0.1, 2, logger=self.logger)

    def test_frequencies(self):
        assert [self.sched.lam_at(q) for q in range(4)] == [5.0, 25.0, 625.0, 390625.0]
        assert self.sched.size == 6

    def test_delta_one_is_inverse_lambda_one(self):
        assert self.sched.delta_at(1) == pytest.approx(1 / 25)

    def test_delta_formula(self):
        for q in range(self.sched.size):
            expected = 25 ** (2 * 0.51 - 1) * self.sched.lam_at(q) ** (-2 * 0.51)
            assert self.sched.delta_at(q) == pytest.approx(expected, rel=1e-12)

    def test_ell(self):
        assert self.sched.ell_at(2) == pytest.approx(625 ** -1.25)

    def test_tau_defined_from_one(self):
        assert self.sched.tau[0] is None
        with pytest.raises(IndexError):
            self.sched.tau_at(0)
        assert all(self.sched.tau_at(q) > 0 for q in range(1, self.sched.size - 1))
        assert self.sched.tau_at(2) < self.sched.tau_at(1)

    def test_stage_starts(self):
        assert self.sched.t_start[0] == -2.0
        assert self.sched.t_start[1] == pytest.approx(-1.8)
        assert all(b > a for a, b in zip(self.sched.t_start, self.sched.t_start[1:]))

    def test_lam_delta_in_log_space(self):
        assert self.sched.lam_delta(1) == pytest.approx(1.0)

    def test_overflow_tracked(self):
        sched = build_schedule(10, 5, 0.51, 1.25, 1.0, 0.1, 3)
        assert sched.lam[5].overflow
        assert sched.to_dict()["lambda"][5]["value"] is None
        assert sched.lam[5].log == pytest.approx(5 ** 5 * math.log(10))

    def test_with_M0_and_round_trip(self):
        sched = self.sched.with_M0(12.5)
        restored = type(sched).from_dict(sched.to_dict())
        assert restored.M0 == 12.5
        assert restored.lam_at(2) == sched.lam_at(2)

    def test_invalid_inputs(self):
        with pytest.raises(NonPositiveBase):
            build_schedule(1, 2, 0.51, 1.25, 1.0, 0.1, 2)
        with pytest.raises(ZeroStages):
            build_schedule(5, 2, 0.51, 1.25, 1.0, 0.1, 0)
        with pytest.raises(ConfigError):
            build_schedule(5, 2, 0.51, 1.25, 1.0, 0.1, 2, L=0.5)

    def test_out_of_range_parameter_warns(self):
        logger = Mock()
        build_schedule(5, 2, 0.8, 1.25, 1.0, 0.1, 2, logger=logger)
        assert logger.warning.called


class TestAdmissibility:
    """Regime classification."""

    def test_small_base_is_demonstration(self):
        sched = build_schedule(5, 2, 0.51, 1.25, 1.0, 0.1, 2)
        report = check_admissibility(sched, Mode.ADDITIVE)
        assert report.regime is Regime.DEMONSTRATION
        names = {c.name for c in report.failed()}
        assert "a_large" in names
        assert "b_additive" in names
        assert "beta" not in names

    def test_every_check_carries_an_anchor(self):
        sched = build_schedule(5, 2, 0.51, 1.25, 1.0, 0.1, 2, L=4.0)
        report = check_admissibility(sched, Mode.MULTIPLICATIVE)
        data = report.to_dict()
        assert data["regime"] == "demonstration"
        assert all(c["anchor"] for c in data["checks"])
        assert any(c["name"] == "b_multiplicative" for c in data["checks"])


class TestConstants:
    """Closed-form helpers."""

    def test_dual_value_overflow(self):
        assert DualValue.from_log(800.0).overflow
        assert DualValue.from_log(1.0).value == pytest.approx(math.e)

    def test_m0_bound(self):
        assert m0_bound(1.0, math.pi / 4) == pytest.approx(1.0)

    def test_m_L(self):
        assert m_L(16.0) == pytest.approx(math.sqrt(3) * 2 * math.e)

    def test_stage_factors(self):
        assert stage_factors(Mode.ADDITIVE, 4.0)["stress"] == 1.0
        factors = stage_factors(Mode.MULTIPLICATIVE, 16.0)
        assert factors["stress"] == pytest.approx(math.exp(-6))
        assert factors["size"] == pytest.approx(m_L(16.0) ** 4)

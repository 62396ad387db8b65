# test_transport.py

import math

import numpy as np
import pytest

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from msqgforge import transport
from msqgforge.errors import CFLViolation, InsufficientHistory
from msqgforge.spectral import FieldSeries, PeriodicGrid, SymTFField, VectorField
from msqgforge.transport import (
    DriftSampler,
    convergence_order,
    identity_defect,
    integrate_characteristics,
    phase,
    solve_flow,
    transport_stress,
)


def constant_drift(grid, c, k0=0, count=40, dt=0.01, radius=2):
    data = np.zeros((count, 2, 2 * radius + 1, 2 * radius + 1), dtype=complex)
    data[:, 0, radius, radius] = c[0]
    data[:, 1, radius, radius] = c[1]
    return DriftSampler(FieldSeries(VectorField, grid, k0, dt, data, radius))


def steady_drift(grid, values, count=40, dt=0.01, radius=2):
    field = VectorField.from_physical(grid, values)
    series = FieldSeries.zeros(VectorField, grid, 0, count, dt, radius)
    for k in range(count):
        series.set(k, field)
    return DriftSampler(series)


def swirl(t, x1, x2):
    return -np.sin(x2) * np.cos(t), np.sin(x1) * np.cos(t)


class TestDrift:
    """Sampled velocity fields."""

    def setup_method(self):
        self.grid = PeriodicGrid(16)

    def test_constant_drift_evaluates_everywhere(self):
        drift = constant_drift(self.grid, (0.3, -0.2))
        x1, x2 = self.grid.points
        v1, v2 = drift(0.137, x1, x2)
        assert np.allclose(v1, 0.3)
        assert np.allclose(v2, -0.2)
        assert drift.max_speed() == pytest.approx(math.hypot(0.3, 0.2))
        assert drift.covers(0.0, 0.39)
        assert not drift.covers(0.0, 0.5)

    def test_compact_series_required(self):
        series = FieldSeries.zeros(VectorField, self.grid, 0, 4, 0.1)
        with pytest.raises(ValueError):
            DriftSampler(series)


class TestFlow:
    """Backward characteristics and the transported stress."""

    def setup_method(self):
        self.grid = PeriodicGrid(16)
        self.drift = constant_drift(self.grid, (0.3, -0.2))

    def test_constant_drift_flow(self):
        ks = np.arange(5, 15)
        flow = solve_flow(self.drift, 1, 0.1, ks, self.grid)
        times = ks * 0.01
        assert np.allclose(flow.displacement[:, 0], 0.3 * (0.1 - times)[:, None, None])
        assert np.allclose(flow.displacement[:, 1], -0.2 * (0.1 - times)[:, None, None])
        assert np.allclose(flow.displacement[flow.index(10)], 0.0)
        assert flow.residual < 1e-10
        lo, hi = flow.jacobian_range()
        assert lo == pytest.approx(1.0) and hi == pytest.approx(1.0)
        assert flow.to_dict()["jacobian_flag"] is False

    def test_missing_target(self):
        flow = solve_flow(self.drift, 1, 0.1, [9, 10, 11], self.grid)
        with pytest.raises(IndexError):
            flow.index(20)

    def test_history_and_cfl(self):
        with pytest.raises(InsufficientHistory):
            solve_flow(self.drift, 1, 0.1, [50], self.grid)
        fast = constant_drift(self.grid, (200.0, 0.0))
        with pytest.raises(CFLViolation):
            solve_flow(fast, 1, 0.1, [5], self.grid, substeps=1)

    def test_transported_stress_is_shifted(self):
        x1, x2 = self.grid.points
        R = SymTFField.from_physical(self.grid, np.stack([np.cos(x1), np.sin(x2)]))
        flow = solve_flow(self.drift, 1, 0.1, [5, 10], self.grid)
        series = transport_stress(R, flow, self.grid)
        shift = 0.3 * 0.05
        assert np.allclose(series.field(5).physical()[0], np.cos(x1 + shift), atol=1e-10)
        assert np.allclose(series.field(10).physical(), R.physical(), atol=1e-10)

    def test_phase_has_unit_modulus(self):
        flow = solve_flow(self.drift, 1, 0.1, [5], self.grid)
        psi = phase(flow, (0.6, 0.8), 5.0, 5, self.grid)
        assert np.allclose(np.abs(psi.values()), 1.0)

    def test_shear_flow_closed_form(self):
        grid = PeriodicGrid(32)
        x1, x2 = grid.points
        drift = steady_drift(grid, np.stack([np.sin(x2), np.zeros_like(x2)]))
        ks = np.arange(12, 29)
        flow = solve_flow(drift, 0, 0.2, ks, grid)
        for i, k in enumerate(ks):
            assert np.allclose(flow.displacement[i, 0], (0.2 - k * 0.01) * np.sin(x2), atol=1e-10)
            assert np.allclose(flow.displacement[i, 1], 0.0, atol=1e-12)
        assert flow.residual < 1e-6

    def test_composition_matches_direct_integration(self):
        grid = PeriodicGrid(32)
        x1, x2 = grid.points
        drift = steady_drift(grid, 0.5 * np.stack([np.sin(x2) + np.cos(x1), np.sin(x1 - x2)]))
        ks = np.arange(8, 21)
        flow = solve_flow(drift, 0, 0.135, ks, grid)
        for k in (8, 14, 20):
            y1, y2 = integrate_characteristics(drift, k * 0.01, 0.135, x1, x2, 64)
            D = flow.displacement[flow.index(k)]
            assert np.allclose(D[0], y1 - x1, atol=1e-4)
            assert np.allclose(D[1], y2 - x2, atol=1e-4)

    def test_one_step_per_sample(self, monkeypatch):
        calls = []
        real = transport.integrate_characteristics

        def counting(drift, t0, t1, x1, x2, n_steps):
            calls.append(n_steps)
            return real(drift, t0, t1, x1, x2, n_steps)

        monkeypatch.setattr(transport, "integrate_characteristics", counting)
        ks = np.arange(0, 40)
        flow = solve_flow(self.drift, 1, 0.1, ks, self.grid)
        # 10 intervals below the anchor, 29 above
        assert calls == [1] * 39
        assert flow.to_dict()["n_steps"] == 1

class TestCharacteristics:
    """RK4 integration oracles."""

    def test_forward_backward_identity(self):
        grid = PeriodicGrid(16)
        assert identity_defect(swirl, 0.0, 0.5, grid, 64) < 1e-7

    def test_fourth_order(self):
        x1 = np.linspace(0, 2 * np.pi, 7)
        x2 = np.linspace(0, np.pi, 7)
        orders = convergence_order(swirl, 0.0, 1.0, x1, x2, [8, 16, 32])
        assert all(3.3 < o < 4.7 for o in orders)

    def test_integrate_shear(self):
        y1, y2 = integrate_characteristics(lambda t, a, b: (np.ones_like(a), np.zeros_like(b)),
                                           0.0, 0.25, np.zeros(3), np.ones(3), 4)
        assert np.allclose(y1, 0.25) and np.allclose(y2, 1.0)

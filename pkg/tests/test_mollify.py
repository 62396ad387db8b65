# test_mollify.py

import math

import numpy as np
import pytest

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from msqgforge.errors import InsufficientHistory
from msqgforge.mollify import (
    first_moment,
    lag_weights,
    mollify_space,
    mollify_space_series,
    mollify_time,
    mollify_time_at,
    weights_at,
)
from msqgforge.spectral import FieldSeries, PeriodicGrid, ScalarField, ScalarPath


class TestTimeMollifier:
    """One-sided time mollification on the global sample grid."""

    def setup_method(self):
        self.dt = 0.01
        self.width = 0.05
        self.path = ScalarPath(-20, self.dt, (-20 + np.arange(80)) * self.dt)

    def test_lags_lie_in_support(self):
        lags, weights = lag_weights(self.width, self.dt)
        assert np.all(lags * self.dt > self.width)
        assert np.all(lags * self.dt <= 2 * self.width + 1e-12)
        assert weights.sum() == pytest.approx(1.0)

    def test_width_below_step(self):
        with pytest.raises(ValueError):
            lag_weights(0.001, 0.01)

    def test_constant_preserved(self):
        path = ScalarPath(0, self.dt, np.full(40, 3.0))
        out = mollify_time(path, self.width, 15, 30)
        assert np.allclose(out.values, 3.0)

    def test_linear_shift(self):
        c = first_moment(self.width, self.dt)
        assert 1.0 < c <= 2.0
        out = mollify_time(self.path, self.width, 0, 40)
        assert np.allclose(out.values, out.times() - c * self.width)

    def test_reads_only_the_past(self):
        lags, _ = lag_weights(self.width, self.dt)
        changed = ScalarPath(self.path.k0, self.dt, self.path.values.copy())
        k = 10
        changed.values[k - int(lags.min()) + 1 - changed.k0:] += 100.0
        a = mollify_time(self.path, self.width, k, k + 1)
        b = mollify_time(changed, self.width, k, k + 1)
        assert a.values[0] == b.values[0]

    def test_insufficient_history(self):
        path = ScalarPath(0, self.dt, np.zeros(40))
        with pytest.raises(InsufficientHistory):
            mollify_time(path, self.width, 5, 20)

    def test_off_grid_evaluation(self):
        ks, weights = weights_at(0.123, self.width, self.dt)
        assert np.all(0.123 - ks * self.dt > self.width)
        assert weights.sum() == pytest.approx(1.0)
        c = first_moment(self.width, self.dt)
        on_grid = mollify_time_at(self.path, self.width, 0.12)
        assert on_grid == pytest.approx(0.12 - c * self.width)


class TestSpaceMollifier:
    """Gaussian spatial mollifier."""

    def setup_method(self):
        self.grid = PeriodicGrid(16)
        x1, _ = self.grid.points
        self.f = ScalarField.from_physical(self.grid, np.cos(3 * x1))

    def test_single_mode_damping(self):
        g = mollify_space(self.f, 0.1)
        assert g.coeffs[3, 0] == pytest.approx(0.5 * math.exp(-0.5 * 0.09))

    def test_series_matches_fieldwise(self):
        series = FieldSeries.from_fields([self.f, 2 * self.f], 0, 0.1, radius=5)
        out = mollify_space_series(series, 0.2)
        assert np.allclose(out.field(1).coeffs, mollify_space(2 * self.f, 0.2).coeffs)

    def test_scale_must_be_positive(self):
        with pytest.raises(ValueError):
            mollify_space(self.f, 0.0)

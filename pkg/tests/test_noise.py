# test_noise.py

import math

import numpy as np
import pytest

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from msqgforge.errors import BandExceedsGrid
from msqgforge.noise import (
    brownian_path,
    noise_modes,
    ou_rate,
    ou_variance,
    sample_noise,
    simulate_ou_modes,
    solve_stokes_z,
    stopping_time_additive,
    stopping_time_mult,
    survival_probability,
    truncate_z,
    upsilon_bounds,
    upsilon_paths,
)
from msqgforge.params import build_schedule
from msqgforge.spectral import PeriodicGrid, ScalarPath, check_solenoidal, norm_hs_sq


class TestSampling:
    """Seeded mode-wise and scalar increments."""

    def setup_method(self):
        self.grid = PeriodicGrid(16)

    def test_half_plane_modes(self):
        assert noise_modes(1.0).tolist() == [[0.0, 1.0], [1.0, 0.0]]
        assert len(noise_modes(2.0)) == 6

    def test_same_seed_same_path(self):
        a = sample_noise(self.grid, 0.1, 0.5, 0.01, 20, seed=7)
        b = sample_noise(self.grid, 0.1, 0.5, 0.01, 20, seed=7)
        c = sample_noise(self.grid, 0.1, 0.5, 0.01, 20, seed=8)
        assert np.array_equal(a.xi, b.xi) and np.array_equal(a.scalar, b.scalar)
        assert not np.array_equal(a.xi, c.xi)

    def test_scalar_stream_independent_of_band(self):
        a = sample_noise(self.grid, 0.1, 0.5, 0.01, 20, seed=7, band=1.0)
        b = sample_noise(self.grid, 0.1, 0.5, 0.01, 20, seed=7, band=3.0)
        assert np.array_equal(a.scalar, b.scalar)
        assert a.band == 1.0 and len(a.modes) == 2

    def test_band_limited_by_grid(self):
        with pytest.raises(BandExceedsGrid):
            sample_noise(self.grid, 0.1, 0.5, 0.01, 20, seed=7, band=6.0)

    def test_truncated_after(self):
        noise = sample_noise(self.grid, 0.1, 0.5, 0.01, 20, seed=7)
        cut = noise.truncated_after(5)
        assert not np.any(cut.xi[5:]) and not np.any(cut.scalar[5:])
        assert np.array_equal(cut.xi[:5], noise.xi[:5])
        assert np.any(noise.xi[5:])

    def test_describe(self):
        info = sample_noise(self.grid, 0.1, 0.5, 0.01, 20, seed=7).describe()
        assert info["steps"] == 20 and info["seed"] == 7
        assert info["decay_exponent"] == pytest.approx(1.75 + 0.4 + 1.0 + 0.25)
        assert info["trace_tail_bound"] > 0


class TestStokes:
    """Ornstein-Uhlenbeck modes of the linear Stokes solution."""

    def setup_method(self):
        self.grid = PeriodicGrid(16)
        self.noise = sample_noise(self.grid, 0.1, 0.5, 0.01, 40, seed=3)
        self.z = solve_stokes_z(self.noise, 0.1)

    def test_variance(self):
        assert ou_variance(1.0, 2.0, 1e6) == pytest.approx(0.25)
        assert ou_variance(1.0, 2.0, 0.0) == 0.0
        assert ou_rate(np.array([[3.0, 4.0]]), 0.25)[0] == pytest.approx(5.0)

    def test_single_kick(self):
        xi = np.zeros((3, 1), dtype=complex)
        xi[0, 0] = 1.0
        mu = np.array([2.0])
        c = simulate_ou_modes(np.array([1.0]), mu, 0.1, xi)
        assert c[0, 0] == 0.0
        assert c[1, 0] == pytest.approx(math.sqrt(ou_variance(1.0, 2.0, 0.1)))
        assert c[2, 0] == pytest.approx(math.exp(-0.2) * c[1, 0])

    def test_field_is_real_and_solenoidal(self):
        assert self.z.steps == 40
        field = self.z.field(10)
        assert field.imaginary_residue() < 1e-12
        check_solenoidal(field)

    def test_zero_before_start(self):
        series = self.z.series(-3, 2)
        assert not np.any(series.data[:4])
        assert np.any(series.data[4])
        with pytest.raises(IndexError):
            self.z.coefficients(0, 42)

    def test_mode_space_norm_matches_field(self):
        assert self.z.hs_norm(0.5, 12, 13)[0] ** 2 == pytest.approx(norm_hs_sq(self.z.field(12), 0.5))

    def test_truncation(self):
        small = self.z.truncate(1.5)
        assert len(small.modes) == 4 and small.cutoff == 1.5
        sched = build_schedule(5, 2, 0.51, 1.25, 1.0, 0.1, 2)
        assert truncate_z(self.z, 0, sched).cutoff == pytest.approx(1.25)

    def test_zero_amplitude(self):
        noise = sample_noise(self.grid, 0.1, 0.5, 0.01, 10, seed=3, amplitude=0.0)
        assert solve_stokes_z(noise, 0.1).is_zero()


class TestMultiplicative:
    """Scalar Brownian motion and Υ = e^B."""

    def setup_method(self):
        self.noise = sample_noise(PeriodicGrid(16), 0.1, 0.5, 0.01, 50, seed=5, band=1.0)

    def test_brownian_path(self):
        B = brownian_path(self.noise)
        assert B.values[0] == 0.0 and len(B) == 51
        assert np.allclose(np.diff(B.values), 0.1 * self.noise.scalar)
        assert len(brownian_path(self.noise, 10)) == 11

    def test_upsilon_of_zero_path(self):
        B = ScalarPath(0, 0.01, np.zeros(50))
        paths = upsilon_paths(B, 0.05, 0, 40)
        assert np.allclose(paths.upsilon.values, 1.0)
        assert np.allclose(paths.mollified.values, 1.0)
        assert paths.mollified.k0 == 0
        checks = upsilon_bounds(paths, 4.0, 39, 0.01)
        assert all(c["holds"] for c in checks.values())


class TestStopping:
    """First-crossing stopping times."""

    def test_multiplicative_cap(self):
        B = ScalarPath(0, 0.1, np.zeros(40))
        st = stopping_time_mult(B, 2.0, 0.01)
        assert (st.value, st.trigger) == (2.0, "cap")
        assert st.extras["L"] == 2.0
        assert st.to_dict()["anchor"] == "stopping.multiplicative"

    def test_multiplicative_sup_crossing(self):
        B = ScalarPath(0, 0.1, np.array([0.0, 0.0, 5.0, 5.0]))
        st = stopping_time_mult(B, 2.0, 0.01)
        assert st.value == pytest.approx(0.2)
        assert st.trigger == "sup"
        assert st.k_stop == 2

    def test_additive_zero_noise_reaches_cap(self):
        grid = PeriodicGrid(16)
        z = solve_stokes_z(sample_noise(grid, 0.1, 0.5, 0.01, 120, seed=1, amplitude=0.0), 0.1)
        sched = build_schedule(5, 2, 0.51, 1.25, 1.0, 0.1, 2)
        st = stopping_time_additive(z, sched, 1.0, 1.0, 0.01, 0.1, 8.0, cap=1.0)
        assert (st.value, st.trigger) == (1.0, "cap")
        assert all(t is None for t in st.crossings.values())
        assert st.extras["energy_threshold"] > 0
        assert st.anchor == "stopping.additive"

    def test_additive_large_noise_stops_early(self):
        grid = PeriodicGrid(16)
        z = solve_stokes_z(sample_noise(grid, 0.1, 0.5, 0.01, 120, seed=1, amplitude=1e4), 0.1)
        sched = build_schedule(5, 2, 0.51, 1.25, 1.0, 0.1, 2)
        st = stopping_time_additive(z, sched, 1.0, 1.0, 0.01, 0.1, 8.0, cap=1.0)
        assert st.value < 1.0 and st.trigger != "cap"


class TestSurvival:
    """Monte Carlo estimate of P(T_L >= T)."""

    def test_monotone_and_worker_independent(self):
        a = survival_probability([1.5, 4.0, 50.0], 1.0, 24, 0.01, 0.01, seed=2, workers=1)
        b = survival_probability([1.5, 4.0, 50.0], 1.0, 24, 0.01, 0.01, seed=2, workers=3)
        assert a.to_dict() == b.to_dict()
        assert a.monotone
        assert all(0.0 <= r.probability <= 1.0 for r in a.rows)
        assert a.to_dict()["anchor"] == "stopping.survival"

    def test_level_below_horizon_never_survives(self):
        table = survival_probability([0.5], 1.0, 5, 0.01, 0.01, seed=2)
        assert table.rows[0].probability == 0.0 and table.rows[0].stderr == 0.0

# test_spectral.py

import math

import numpy as np
import pytest

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from msqgforge.errors import BandExceedsGrid, ConfigError, NegativePowerOnMean, NotSolenoidal
from msqgforge.spectral import (
    FieldSeries,
    PeriodicGrid,
    ScalarField,
    SymTFField,
    VectorField,
    annulus_project,
    band_project,
    check_solenoidal,
    div,
    div_tensor,
    frac_laplacian,
    grad,
    holder_running,
    holder_time,
    inverse_divergence,
    leray_project,
    norm_hs_sq,
    norm_sup,
    perp_curl,
    pressure_poisson,
    series_hs_sq,
    spectral_mass_outside,
    sqg_nonlinearity,
    sqg_nonlinearity_expanded,
)
from msqgforge.spectral.interp import evaluate, interpolate_periodic, resample, spline_coefficients
from msqgforge.spectral.symbols import annulus_symbol, bump


def random_field(grid, kind, rng, radius=6):
    """Real, mean-free random field with spectrum in the box |m_i| <= radius."""
    shape = kind.shape_for(grid)
    coeffs = grid.forward(rng.standard_normal(shape))
    keep = (np.abs(grid.m1) <= radius) & (np.abs(grid.m2) <= radius)
    coeffs = coeffs * keep
    coeffs[..., 0, 0] = 0.0
    return kind(grid, coeffs)


def l2(f):
    return float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2)))


class TestGrid:
    """Grid construction and Fourier conventions."""

    def test_size_checks(self):
        with pytest.raises(ConfigError):
            PeriodicGrid(33)
        with pytest.raises(ConfigError):
            PeriodicGrid(8)

    def test_dealias_radius(self):
        assert PeriodicGrid(128).dealias_radius == 42
        assert PeriodicGrid(16).dealias_radius == 5

    def test_require_band(self):
        grid = PeriodicGrid(16)
        grid.require_band(5.0)
        with pytest.raises(BandExceedsGrid, match="N=16"):
            grid.require_band(28.125)

    def test_coefficient_convention(self):
        grid = PeriodicGrid(16)
        x1, _ = grid.points
        f = ScalarField.from_physical(grid, np.cos(3 * x1))
        assert f.coeffs[3, 0] == pytest.approx(0.5)
        assert f.coeffs[-3, 0] == pytest.approx(0.5)
        assert np.allclose(f.physical(), np.cos(3 * x1))
        assert f.imaginary_residue() < 1e-12


class TestOperators:
    """Multipliers, projections and bilinear forms."""

    def setup_method(self):
        self.grid = PeriodicGrid(32)
        self.rng = np.random.default_rng(11)

    def test_frac_laplacian_on_single_mode(self):
        x1, x2 = self.grid.points
        f = ScalarField.from_physical(self.grid, np.cos(3 * x1 + 4 * x2))
        for r in (1.0, 0.5, -1.0):
            g = frac_laplacian(f, r)
            assert np.allclose(g.coeffs, f.coeffs * 5.0 ** r)

    def test_negative_power_on_mean(self):
        f = ScalarField.from_physical(self.grid, np.ones((32, 32)))
        with pytest.raises(NegativePowerOnMean):
            frac_laplacian(f, -0.5)
        assert np.allclose(frac_laplacian(f, 2.0).coeffs, f.coeffs)

    def test_leray_idempotent_and_solenoidal(self):
        v = random_field(self.grid, VectorField, self.rng)
        p = leray_project(v)
        assert l2(leray_project(p) - p) < 1e-12 * l2(p)
        assert l2(div(p)) < 1e-10 * l2(p)
        check_solenoidal(p)

    def test_leray_kills_gradients(self):
        s = random_field(self.grid, ScalarField, self.rng)
        assert l2(leray_project(grad(s))) < 1e-10 * l2(grad(s))
        with pytest.raises(NotSolenoidal):
            check_solenoidal(grad(s))

    def test_inverse_divergence(self):
        f = random_field(self.grid, VectorField, self.rng)
        R = inverse_divergence(f)
        assert isinstance(R, SymTFField)
        assert l2(div_tensor(R) - leray_project(f)) < 1e-10 * l2(f)
        assert R.imaginary_residue() < 1e-10

    def test_sqg_forms_agree(self):
        v = leray_project(random_field(self.grid, VectorField, self.rng, radius=4))
        a = sqg_nonlinearity(v)
        b = sqg_nonlinearity_expanded(v)
        assert l2(a - b) < 1e-10 * max(l2(a), 1e-300)
        assert l2(a - perp_curl(v, v)) == 0.0

    def test_pressure_recovers_gradient_part(self):
        s = random_field(self.grid, ScalarField, self.rng)
        v = leray_project(random_field(self.grid, VectorField, self.rng))
        G = grad(s) + v
        p = pressure_poisson(G)
        assert l2(p - s) < 1e-10 * l2(s)

    def test_band_projection_support(self):
        f = random_field(self.grid, VectorField, self.rng, radius=10)
        lam = 8.0
        g = band_project(f, (0.6, 0.8), lam)
        assert spectral_mass_outside(g, 7 * lam / 8, 9 * lam / 8) == 0.0
        with pytest.raises(BandExceedsGrid):
            band_project(f, (1.0, 0.0), 12.0)

    def test_annulus(self):
        lam = 2.0
        r = np.array([lam / 4, 3 * lam / 8, lam, 3 * lam, 4 * lam])
        assert annulus_symbol(r, lam).tolist() == [0.0, 1.0, 1.0, 1.0, 0.0]
        f = random_field(self.grid, ScalarField, self.rng, radius=10)
        assert spectral_mass_outside(annulus_project(f, lam), lam / 4, 4 * lam) == 0.0

    def test_bump_plateau(self):
        assert bump(np.array([0.0, 1 / 16, 1 / 8, 0.2])).tolist()[0:2] == [1.0, 1.0]
        assert bump(np.array([1 / 8]))[0] == 0.0


class TestNorms:
    """Sobolev, sup and time-Hölder norms."""

    def setup_method(self):
        self.grid = PeriodicGrid(16)
        x1, _ = self.grid.points
        self.f = ScalarField.from_physical(self.grid, np.cos(3 * x1))

    def test_hs(self):
        assert norm_hs_sq(self.f, 0.0) == pytest.approx(2 * math.pi ** 2)
        assert norm_hs_sq(self.f, 1.0) == pytest.approx(2 * math.pi ** 2 * 9)

    def test_sup(self):
        assert norm_sup(self.f) == pytest.approx(1.0)
        v = VectorField(self.grid, np.stack([self.f.coeffs, self.f.coeffs]))
        assert norm_sup(v) == pytest.approx(math.sqrt(2))

    def test_holder_of_linear_path(self):
        t = np.arange(64) * 0.01
        assert holder_time(t, 0.01, 1.0) == pytest.approx(1.0)
        assert holder_time(t, 0.01, 0.5) == pytest.approx(math.sqrt(32 * 0.01))

    def test_running_holder_is_adapted(self):
        rng = np.random.default_rng(0)
        path = rng.standard_normal(40)
        other = path.copy()
        other[25:] += 5.0
        a = holder_running(path, 0.01, 0.4)
        b = holder_running(other, 0.01, 0.4)
        assert np.array_equal(a[:25], b[:25])
        assert np.all(np.diff(a) >= 0)

    def test_series_hs_matches_field_norm(self):
        series = FieldSeries.from_fields([self.f, 2 * self.f], 0, 0.1, radius=4)
        values = series_hs_sq(series, 0.5)
        assert values[0] == pytest.approx(norm_hs_sq(self.f, 0.5))
        assert values[1] == pytest.approx(4 * values[0])


class TestSeries:
    """Boxed time series and resampling."""

    def setup_method(self):
        self.grid = PeriodicGrid(32)
        self.rng = np.random.default_rng(5)

    def test_box_round_trip_and_window(self):
        fields = [random_field(self.grid, VectorField, self.rng, radius=3) for _ in range(5)]
        series = FieldSeries.from_fields(fields, 10, 0.5, radius=3)
        assert series.data.shape == (5, 2, 7, 7)
        assert series.k1 == 15
        assert np.allclose(series.field(12).coeffs, fields[2].coeffs)
        sub = series.window(11, 13)
        assert (sub.k0, len(sub)) == (11, 2)
        with pytest.raises(IndexError):
            series.field(15)

    def test_rebox_truncates(self):
        f = random_field(self.grid, ScalarField, self.rng, radius=6)
        series = FieldSeries.from_fields([f], 0, 1.0)
        small = series.rebox(2)
        kept = small.field(0).coeffs
        mask = (np.abs(self.grid.m1) <= 2) & (np.abs(self.grid.m2) <= 2)
        assert np.allclose(kept[mask], f.coeffs[mask])
        assert np.all(kept[~mask] == 0)

    def test_resample_and_evaluate(self):
        f = random_field(self.grid, ScalarField, self.rng, radius=5)
        fine = PeriodicGrid(64)
        g = ScalarField(fine, resample(f.coeffs, self.grid, fine))
        x1, x2 = self.grid.points
        assert np.allclose(g.physical()[::2, ::2], f.physical())
        pts = evaluate(f.coeffs, self.grid, x1[:3, :3], x2[:3, :3])
        assert np.allclose(pts.real, f.physical()[:3, :3])

    def test_periodic_splines(self):
        x1, x2 = self.grid.points
        h = self.grid.spacing
        pts1 = self.rng.uniform(-3.0, 9.0, (7, 5))
        pts2 = self.rng.uniform(-3.0, 9.0, (7, 5))
        constant = spline_coefficients(np.full((2, 32, 32), 0.7))
        assert np.allclose(interpolate_periodic(constant, h, pts1, pts2), 0.7, atol=1e-12)
        smooth = np.stack([np.sin(x1) * np.cos(2 * x2), np.cos(x1 + x2)])
        coeffs = spline_coefficients(smooth)
        # nodes, shifted by whole periods
        at_nodes = interpolate_periodic(coeffs, h, x1 + 2 * np.pi, x2 - 4 * np.pi)
        assert np.allclose(at_nodes, smooth, atol=1e-10)
        off = interpolate_periodic(coeffs, h, pts1, pts2)
        assert off.shape == (2, 7, 5)
        assert np.allclose(off[0], np.sin(pts1) * np.cos(2 * pts2), atol=1e-3)
        assert np.allclose(off[1], np.cos(pts1 + pts2), atol=1e-3)

# test_geometry.py

from fractions import Fraction

import numpy as np
import pytest

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from msqgforge.errors import GeometryUnavailable, OutsideBall
from msqgforge.geometry import (
    Parity,
    build_direction_system,
    gamma_coeffs,
    lattice_checks,
    max_gamma,
    reconstruct,
    sample_ball,
)
from msqgforge.params import compute_M0


class TestDirectionSystem:
    """Direction sets, positivity radius and the rank-one reconstruction."""

    def setup_method(self):
        self.geo = build_direction_system()
        self.rng = np.random.default_rng(3)

    def test_sets_and_radius(self):
        assert len(self.geo.gamma1.directions) == 6
        assert len(self.geo.all_directions()) == 12
        assert 0 < self.geo.eps_gamma < 1
        assert self.geo.eps_exact == Fraction(95, 100) * min(self.geo.gamma1.radius(), self.geo.gamma2.radius())
        assert self.geo.to_dict()["ball_norm"] == "entrywise sup"

    def test_lattice_properties(self):
        assert all(lattice_checks(self.geo).values())

    def test_parity(self):
        assert Parity.of(3) is Parity.ODD
        assert Parity.of(4) is Parity.EVEN
        assert self.geo.select(Parity.ODD) is self.geo.gamma1

    def test_identity_coefficients_positive(self):
        for dset in (self.geo.gamma1, self.geo.gamma2):
            c = dset.coefficients_exact(Fraction(1), Fraction(0), Fraction(1))
            assert all(v > 0 for v in c)

    @pytest.mark.parametrize("parity", [Parity.ODD, Parity.EVEN])
    def test_reconstruction_on_ball(self, parity):
        samples = sample_ball(self.geo, 200, self.rng, include_vertices=False)
        for r11, r12, r22 in samples:
            gammas = gamma_coeffs(self.geo, parity, (r11, r12, r22))
            assert all(np.isfinite(g) and g > 0 for g in gammas.values())
            R = reconstruct(self.geo.select(parity), gammas)
            assert np.allclose(R, [[r11, r12], [r12, r22]], atol=1e-12)

    def test_matrix_input_and_symmetric_pairs(self):
        gammas = gamma_coeffs(self.geo, Parity.EVEN, np.eye(2))
        assert gammas[(0.0, 1.0)] == gammas[(-0.0, -1.0)]
        assert len(gammas) == 6

    def test_outside_ball(self):
        eps = self.geo.eps_gamma
        with pytest.raises(OutsideBall):
            gamma_coeffs(self.geo, Parity.ODD, (1.0 + 1.1 * eps, 0.0, 1.0))
        gamma_coeffs(self.geo, Parity.ODD, (1.0 + eps * (1 + 1e-4), 0.0, 1.0), slack=1e-3)

    def test_M0(self):
        gmax = max_gamma(self.geo, 1000, seed=0)
        assert gmax > 0
        assert compute_M0(self.geo, 1.0, samples=1000) == pytest.approx((4 / np.pi * gmax) ** 2)
        with pytest.raises(GeometryUnavailable):
            compute_M0(None, 1.0)

# profiles/affine.py

import numpy as np

from ..errors import ConfigError
from . import register_profile
from .base import BaseProfile, ProfileBounds


class AffineProfile(BaseProfile):
    """e(t) = d0 + d1 t with d1 > 0 and d0 > 2 d1 + 4."""

    kind = "affine"

    def __init__(self, config=None, logger=None):
        super().__init__(config, logger)
        self.d0 = self._require("d0")
        self.d1 = self._require("d1")
        if not self.d1 > 0:
            raise ConfigError(f"affine energy needs d1 > 0, got {self.d1}")
        if not self.d0 > 2 * self.d1 + 4:
            raise ConfigError(f"affine energy needs d0 > 2 d1 + 4, got d0={self.d0}, d1={self.d1}")

    def value(self, t):
        return self.d0 + self.d1 * np.asarray(t, dtype=float)

    def derivative(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.d1)

    def bounds(self, start, stop, samples=0):
        lo, hi = self.d0 + self.d1 * start, self.d0 + self.d1 * stop
        return ProfileBounds(e_bar=hi, e_tilde=self.d1, e_low=lo)


def register():
    register_profile("affine", AffineProfile)


register()

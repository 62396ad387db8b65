# profiles/exponential.py

import math

import numpy as np

from ..errors import ConfigError
from . import register_profile
from .base import BaseProfile, ProfileBounds


class ExponentialProfile(BaseProfile):
    """e(t) = d0 e^{d1 t} with d1 > 0 and d0 > 4 e^{2 d1}."""

    kind = "exponential"

    def __init__(self, config=None, logger=None):
        super().__init__(config, logger)
        self.d0 = self._require("d0")
        self.d1 = self._require("d1")
        if not self.d1 > 0:
            raise ConfigError(f"exponential energy needs d1 > 0, got {self.d1}")
        if not self.d0 > 4 * math.exp(2 * self.d1):
            raise ConfigError(f"exponential energy needs d0 > 4 e^(2 d1), got d0={self.d0}, d1={self.d1}")

    def value(self, t):
        return self.d0 * np.exp(self.d1 * np.asarray(t, dtype=float))

    def derivative(self, t):
        return self.d1 * self.value(t)

    def bounds(self, start, stop, samples=0):
        hi = self.d0 * math.exp(self.d1 * stop)
        return ProfileBounds(e_bar=hi, e_tilde=self.d1 * hi, e_low=self.d0 * math.exp(self.d1 * start))


def register():
    register_profile("exponential", ExponentialProfile)


register()

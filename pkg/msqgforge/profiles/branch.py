# profiles/branch.py

import numpy as np

from ..errors import ConfigError
from . import register_profile
from .base import BaseProfile


def _transition(s):
    """C^∞ step from 0 (s <= 0) to 1 (s >= 1)."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    f = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
    g = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return f / (f + g)


def _transition_derivative(s, h=1e-6):
    return (_transition(np.asarray(s) + h) - _transition(np.asarray(s) - h)) / (2 * h)


class BranchProfile(BaseProfile):
    """
    Equal to a first profile up to 'branch_time', then blends smoothly into a
    second profile over 'blend' time units.
    """

    kind = "branch"

    def __init__(self, config=None, logger=None):
        super().__init__(config, logger)
        self.first = self.config.get("first")
        self.second = self.config.get("second")
        if not isinstance(self.first, BaseProfile) or not isinstance(self.second, BaseProfile):
            raise ConfigError("branch energy needs 'first' and 'second' profiles")
        self.branch_time = self._require("branch_time")
        self.blend = float(self.config.get("blend", 0.05))
        if self.blend <= 0:
            raise ConfigError("branch blend width must be positive")

    def _weight(self, t):
        return _transition((np.asarray(t, dtype=float) - self.branch_time) / self.blend)

    def value(self, t):
        w = self._weight(t)
        return (1 - w) * self.first.value(t) + w * self.second.value(t)

    def derivative(self, t):
        w = self._weight(t)
        dw = _transition_derivative((np.asarray(t, dtype=float) - self.branch_time) / self.blend) / self.blend
        e1, e2 = self.first.value(t), self.second.value(t)
        return (1 - w) * self.first.derivative(t) + w * self.second.derivative(t) + dw * (e2 - e1)

    def to_dict(self):
        return {"kind": self.kind, "first": self.first.to_dict(), "second": self.second.to_dict(),
                "branch_time": self.branch_time, "blend": self.blend}


def register():
    register_profile("branch", BranchProfile)


register()

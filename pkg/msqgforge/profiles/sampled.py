# profiles/sampled.py

import numpy as np

from ..errors import ConfigError
from . import register_profile
from .base import BaseProfile, ProfileBounds


class SampledProfile(BaseProfile):
    """Piecewise-linear profile through a table (t_i, e_i), held constant outside it."""

    kind = "sampled"

    def __init__(self, config=None, logger=None):
        super().__init__(config, logger)
        times = np.asarray(self.config.get("times", []), dtype=float)
        values = np.asarray(self.config.get("values", []), dtype=float)
        if times.size < 2 or times.shape != values.shape:
            raise ConfigError("sampled energy needs matching 'times' and 'values' with at least two entries")
        if np.any(np.diff(times) <= 0):
            raise ConfigError("sampled energy times must be strictly increasing")
        self.times = times
        self.values = values
        self.slopes = np.diff(values) / np.diff(times)

    def value(self, t):
        return np.interp(np.asarray(t, dtype=float), self.times, self.values)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, len(self.slopes) - 1)
        inside = (t >= self.times[0]) & (t <= self.times[-1])
        return np.where(inside, self.slopes[idx], 0.0)

    def bounds(self, start, stop, samples=0):
        mask = (self.times > start) & (self.times < stop)
        pts = np.concatenate([[start, stop], self.times[mask]])
        vals = self.value(pts)
        return ProfileBounds(e_bar=float(vals.max()), e_tilde=float(np.abs(self.slopes).max()),
                             e_low=float(vals.min()))


def register():
    register_profile("sampled", SampledProfile)


register()

# profiles/base.py

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Any, Optional

import numpy as np

from ..errors import ConfigError


@dataclass(frozen=True)
class ProfileBounds:
    """ē = sup e, ẽ = sup |e'|, ŭ = inf e over an interval."""
    e_bar: float
    e_tilde: float
    e_low: float

    def to_dict(self) -> dict:
        return {"e_bar": self.e_bar, "e_tilde": self.e_tilde, "e_low": self.e_low}


class BaseProfile(ABC):
    """
    Base class for prescribed energy profiles e(t).

    Profiles evaluate elementwise on numpy arrays of times.
    """

    kind = "base"

    def __init__(self, config: Optional[Dict[str, Any]] = None, logger=None):
        """
        Args:
            config: Profile-specific configuration dictionary
            logger: Optional logger instance
        """
        self.config = config or {}
        self.logger = logger

    def _log_debug(self, msg: str) -> None:
        if self.logger:
            self.logger.debug(msg)

    def _log_error(self, msg: str) -> None:
        if self.logger:
            self.logger.error(msg)

    def _require(self, key: str) -> float:
        if key not in self.config:
            self._log_error(f"{self.kind} profile missing '{key}'")
            raise ConfigError(f"{self.kind} energy profile requires '{key}'")
        return float(self.config[key])

    @abstractmethod
    def value(self, t):
        """e(t)."""

    @abstractmethod
    def derivative(self, t):
        """e'(t)."""

    def bounds(self, start: float, stop: float, samples: int = 4001) -> ProfileBounds:
        """Bounds from dense sampling of [start, stop]; subclasses may override with closed forms."""
        t = np.linspace(start, stop, samples)
        e = np.asarray(self.value(t), dtype=float)
        de = np.asarray(self.derivative(t), dtype=float)
        return ProfileBounds(e_bar=float(e.max()), e_tilde=float(np.abs(de).max()), e_low=float(e.min()))

    def validate(self, start: float, stop: float) -> ProfileBounds:
        """
        Check ē >= ŭ > 4 and ẽ > 0 on [start, stop].

        Raises:
            ConfigError: If the bounds are violated.
        """
        b = self.bounds(start, stop)
        if not b.e_low > 4:
            self._log_error(f"energy infimum {b.e_low:g} is not above 4")
            raise ConfigError(f"{self.kind} energy profile must stay above 4 on [{start}, {stop}], inf = {b.e_low:g}")
        if not b.e_bar >= b.e_low:
            raise ConfigError("energy supremum below its infimum")
        if not b.e_tilde > 0:
            raise ConfigError(f"{self.kind} energy profile derivative bound must be positive")
        self._log_debug(f"{self.kind} profile bounds on [{start}, {stop}]: {b}")
        return b

    def to_dict(self) -> dict:
        return {"kind": self.kind, **{k: v for k, v in self.config.items() if isinstance(v, (int, float, list))}}

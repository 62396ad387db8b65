# profiles/__init__.py

import importlib
from typing import Any, Dict, Optional, Type

from ..errors import ConfigError

# Kinds shipped with the package and the EnergyConfig fields each one reads.
PROFILE_PARAMETERS: Dict[str, tuple] = {
    "affine": ("d0", "d1"),
    "exponential": ("d0", "d1"),
    "sampled": ("times", "values"),
    "branch": ("first", "second", "branch_time", "blend"),
}

_PROFILES: Dict[str, Type["BaseProfile"]] = {}


def register_profile(kind: str, profile_class: Type["BaseProfile"]) -> None:
    """Make 'profile_class' the energy profile built for 'kind'."""
    _PROFILES[kind.lower()] = profile_class


def _profile_class(kind: str, logger=None) -> Type["BaseProfile"]:
    """
    The class registered for 'kind', importing its module on first use.

    Raises:
        ConfigError: If 'kind' names no known profile.
    """
    if kind not in _PROFILES and kind in PROFILE_PARAMETERS:
        module = importlib.import_module(f"{__name__}.{kind}")
        if kind not in _PROFILES:
            module.register()
    if kind not in _PROFILES:
        if logger:
            logger.error(f"Unknown energy profile '{kind}'")
        raise ConfigError(f"Unknown energy profile '{kind}'; expected one of {', '.join(sorted(PROFILE_PARAMETERS))}")
    return _PROFILES[kind]


def get_profile(kind: str = "affine", params: Optional[Dict[str, Any]] = None, logger=None) -> "BaseProfile":
    """
    Build the energy profile e(t) of the given kind.

    Args:
        kind: One of PROFILE_PARAMETERS, or a kind added by register_profile.
        params: The kind's parameters (d0/d1, times/values, or the branch pair).

    Raises:
        ConfigError: If the kind is unknown or the profile rejects its parameters.
    """
    profile = _profile_class(kind.lower(), logger)(params or {}, logger)
    if logger:
        logger.debug(f"Energy profile {profile.kind}: {profile.to_dict()}")
    return profile


def profile_from_config(energy, logger=None) -> "BaseProfile":
    """Build the primary profile of an EnergyConfig from the fields its kind reads."""
    kind = energy.kind.lower()
    fields = PROFILE_PARAMETERS.get(kind, ())
    return get_profile(kind, {name: getattr(energy, name) for name in fields if hasattr(energy, name)}, logger)


def branch_profile(first, second, t_branch: float, blend: float = 0.05, logger=None) -> "BaseProfile":
    """Profile equal to 'first' up to t_branch and to 'second' after a smooth blend."""
    return get_profile("branch", {"first": first, "second": second, "branch_time": t_branch, "blend": blend}, logger)


from .base import BaseProfile, ProfileBounds

__all__ = ['PROFILE_PARAMETERS', 'register_profile', 'get_profile', 'profile_from_config', 'branch_profile',
           'BaseProfile', 'ProfileBounds']

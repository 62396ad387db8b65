# __init__.py

from .defaults import DEFAULT_CONFIG
from .config import RunConfig, load_config
from .logger import Logger
from .interface import Forge
from .errors import (
    BandExceedsGrid,
    CheckpointError,
    ConfigError,
    ForgeError,
    NumericalFault,
    StrictModeFailure,
)

__all__ = [
    "Forge",
    "Logger",
    "DEFAULT_CONFIG",
    "RunConfig",
    "load_config",
    "ForgeError",
    "ConfigError",
    "BandExceedsGrid",
    "CheckpointError",
    "NumericalFault",
    "StrictModeFailure",
]

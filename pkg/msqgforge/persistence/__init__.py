# persistence/__init__.py

from .checkpoint import CheckpointWriter, decode_modes, decode_path, decode_series, encode_modes, encode_path, encode_series
from .history import REPORT_SCHEMA, RunHistory, RunState
from .save_manager import ReportSaveManager

__all__ = [
    "CheckpointWriter",
    "decode_modes",
    "decode_path",
    "decode_series",
    "encode_modes",
    "encode_path",
    "encode_series",
    "REPORT_SCHEMA",
    "RunHistory",
    "RunState",
    "ReportSaveManager",
]

# logger.py

import json
import logging
import os
import sys
from typing import Any, Optional

TRACE_NAME = "run_trace.json"
LINE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _with_parent(path: str) -> str:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return path


class Logger:
    """
    Run logger: log lines through the logging module, tagged with the stage
    being built, plus the JSON run trace that mirrors the report after
    every update.

    The trace goes to 'trace_file' when given, else next to 'log_file' when
    logging to a file; log_file "-" means stdout and None means stderr.
    """

    def __init__(self, name: str, logging_enabled: bool = False, log_file: Optional[str] = None,
                 trace_file: Optional[str] = None):
        self._logger = logging.getLogger(name)
        self._logger.propagate = False
        self._logger.handlers.clear()
        self.logging_enabled = logging_enabled
        self.log_file = log_file
        self.stage: Optional[int] = None
        self.json_trace_path = _with_parent(trace_file) if trace_file else None

        if not logging_enabled:
            self._logger.addHandler(logging.NullHandler())
            return
        self._logger.addHandler(self._handler(log_file))
        self._logger.setLevel(logging.DEBUG)
        if self.json_trace_path is None and log_file not in (None, "", "-"):
            self.json_trace_path = os.path.join(os.path.dirname(log_file) or ".", TRACE_NAME)
        if self.json_trace_path:
            self.debug(f"Run trace goes to {self.json_trace_path}")

    @staticmethod
    def _handler(log_file: Optional[str]) -> logging.Handler:
        if log_file == "-":
            handler = logging.StreamHandler(sys.stdout)
        elif log_file:
            handler = logging.FileHandler(_with_parent(log_file), mode="w")
        else:
            handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(logging.DEBUG)
        handler.setFormatter(logging.Formatter(LINE_FORMAT))
        return handler

    def at_stage(self, q: Optional[int]) -> None:
        """Prefix later lines with the stage index; None clears it."""
        self.stage = q

    def _log(self, level: int, msg: str, exc_info: Optional[bool] = None) -> None:
        if self.stage is not None:
            msg = f"[stage {self.stage}] {msg}"
        self._logger.log(level, msg, exc_info=exc_info)

    def debug(self, msg: str) -> None:
        self._log(logging.DEBUG, msg)

    def info(self, msg: str) -> None:
        self._log(logging.INFO, msg)

    def warning(self, msg: str) -> None:
        self._log(logging.WARNING, msg)

    def error(self, msg: str, exc_info: Optional[bool] = None) -> None:
        self._log(logging.ERROR, msg, exc_info)

    def write_json(self, data: Any) -> None:
        """
        Replace the run trace with 'data'. The file is written beside the
        trace and renamed over it, so readers never see half a report.
        """
        if not self.json_trace_path:
            return
        partial = self.json_trace_path + ".part"
        try:
            with open(partial, "w", encoding="utf-8") as f:
                json.dump(data, f, indent=2)
            os.replace(partial, self.json_trace_path)
        except (OSError, TypeError, ValueError) as e:
            self.error(f"Run trace not written: {e}")

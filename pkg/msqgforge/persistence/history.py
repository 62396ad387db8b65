# persistence/history.py

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .save_manager import _plain

REPORT_SCHEMA = "msqg-report/1"


@dataclass
class RunState:
    """
    Report under construction.

    'stages' holds one block per stage in order; every other key the run
    adds (schedule, regime, constants, stopping time...) lives in 'sections'.
    """
    stages: List[Dict[str, Any]] = field(default_factory=list)
    sections: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        result = {"schema": REPORT_SCHEMA}
        result.update(self.sections)
        result["stages"] = list(self.stages)
        return result


class RunHistory:
    """
    The run report as it grows, stage by stage.

    Each update refreshes the latest snapshot and mirrors it to the logger's
    JSON run trace, so an interrupted run still leaves its last complete
    stage on disk. Earlier snapshots are not kept.
    """

    def __init__(self, logger=None, run_config: Optional[dict] = None):
        self.current_state = RunState()
        self.latest: Optional[dict] = None
        self.updates = 0
        self.logger = logger
        if run_config:
            self.current_state.sections["config"] = run_config

    def create_state_snapshot(self) -> dict:
        return _plain(self.current_state.to_dict())

    def update_state(self, stage: Optional[Dict[str, Any]] = None, **sections) -> None:
        """Append a stage block and/or set report sections, then snapshot."""
        if stage is not None:
            self.current_state.stages.append(stage)
        for key, value in sections.items():
            self.current_state.sections[key] = value
        self.latest = self.create_state_snapshot()
        self.updates += 1
        if self.logger and hasattr(self.logger, "write_json"):
            self.logger.write_json(self.latest)

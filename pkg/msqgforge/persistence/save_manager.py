# persistence/save_manager.py

import csv
import json
import math
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np


def _plain(value):
    """JSON-safe copy: numpy scalars and arrays become Python numbers and lists, non-finite floats strings."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return _plain(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


class ReportSaveManager:
    """Writes report.json and the CSV traces of a run into one output directory."""

    def __init__(self, save_directory: str = "./msqg_out/", overwrite: bool = True):
        """
        Args:
            save_directory: Directory the report files go to.
            overwrite: Replace existing files; otherwise a numbered name is picked.
        """
        self.save_directory = Path(save_directory)
        self.overwrite = overwrite

    def save_report(self, report: Dict[str, Any], filename: str = "report.json") -> Tuple[Optional[str], Optional[str]]:
        """
        Save the run report as JSON.

        Returns:
            Tuple of (file_path, error_message); exactly one of them is None.
        """
        try:
            self._ensure_save_directory()
            if not filename.endswith(".json"):
                filename = f"{filename}.json"
            file_path = self.save_directory / self._get_unique_filename(filename)
            with open(file_path, "w", encoding="utf-8") as f:
                json.dump(_plain(report), f, indent=2, ensure_ascii=False)
            return str(file_path), None
        except Exception as e:
            return None, str(e)

    def save_table(self, filename: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Tuple[Optional[str], Optional[str]]:
        """Save rows as CSV with a header line."""
        try:
            self._ensure_save_directory()
            if not filename.endswith(".csv"):
                filename = f"{filename}.csv"
            file_path = self.save_directory / self._get_unique_filename(filename)
            with open(file_path, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(list(header))
                for row in rows:
                    writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
            return str(file_path), None
        except Exception as e:
            return None, str(e)

    def save_energy_trace(self, stages: List[Dict[str, Any]]) -> Tuple[Optional[str], Optional[str]]:
        """energy_trace.csv: one row per (stage, sample) with e(t), ‖v_q(t)‖² and the gap window ratio."""
        rows = []
        for stage in stages:
            trace = stage.get("energy_trace", {})
            for t, e, v, ratio in zip(trace.get("t", []), trace.get("e", []), trace.get("energy", []),
                                      trace.get("ratio", [])):
                rows.append((stage["q"], t, e, v, ratio))
        return self.save_table("energy_trace.csv", ("q", "t", "e", "solution_energy", "gap_ratio"), rows)

    def save_stress_norms(self, stages: List[Dict[str, Any]]) -> Tuple[Optional[str], Optional[str]]:
        """stress_norms.csv: one row per stage with the sup of every stress component."""
        names: List[str] = []
        for stage in stages:
            for name in stage.get("stress", {}).get("components", {}):
                if name not in names:
                    names.append(name)
        rows = []
        for stage in stages:
            stress = stage.get("stress")
            if not stress:
                continue
            comps = stress.get("components", {})
            rows.append([stage["q"]] + [comps.get(n, "") for n in names] + [stress.get("ratio", "")])
        return self.save_table("stress_norms.csv", ["q"] + names + ["ratio"], rows)

    def _ensure_save_directory(self) -> None:
        try:
            self.save_directory.mkdir(parents=True, exist_ok=True)
        except Exception as e:
            raise IOError(f"Failed to create save directory: {e}")

    def _get_unique_filename(self, filename: str) -> str:
        """
        The filename itself when overwriting is allowed or the file is new,
        else the first free name_NNN variant.
        """
        if self.overwrite or not (self.save_directory / filename).exists():
            return filename
        name_part = filename.rsplit('.', 1)[0] if '.' in filename else filename
        ext_part = '.' + filename.rsplit('.', 1)[1] if '.' in filename else ''
        counter = 1
        while counter <= 999:
            numbered = f"{name_part}_{counter:03d}{ext_part}"
            if not (self.save_directory / numbered).exists():
                return numbered
            counter += 1
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        return f"{name_part}_{timestamp}{ext_part}"

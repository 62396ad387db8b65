# test_persistence.py

import csv
import json
from unittest.mock import Mock

import numpy as np
import pytest

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from msqgforge.errors import CheckpointError
from msqgforge.noise import sample_noise, solve_stokes_z
from msqgforge.persistence import (
    REPORT_SCHEMA,
    CheckpointWriter,
    ReportSaveManager,
    RunHistory,
    RunState,
    decode_path,
    decode_series,
    encode_path,
    encode_series,
)
from msqgforge.persistence.save_manager import _plain
from msqgforge.spectral import FieldSeries, PeriodicGrid, ScalarPath, SymTFField, VectorField


class MockLogger:
    def __init__(self):
        self.debug = Mock()
        self.info = Mock()
        self.warning = Mock()
        self.error = Mock()
        self.write_json = Mock()


class TestCheckpoints:
    """MSQG1 binary checkpoints."""

    def setup_method(self):
        self.grid = PeriodicGrid(16)
        rng = np.random.default_rng(0)
        data = rng.standard_normal((3, 2, 7, 7)) + 1j * rng.standard_normal((3, 2, 7, 7))
        self.series = FieldSeries(SymTFField, self.grid, -2, 0.125, data, 3)

    def test_series_is_bit_exact(self):
        series, seed = decode_series(encode_series(self.series, seed=42))
        assert seed == 42
        assert series.kind is SymTFField
        assert (series.k0, series.radius, series.dt) == (-2, 3, 0.125)
        assert np.array_equal(series.data, self.series.data)

    def test_full_grid_series(self):
        full = FieldSeries.zeros(VectorField, self.grid, 0, 2, 0.5)
        full.data[1, 0, 3, 4] = 1.5 - 2j
        series, _ = decode_series(encode_series(full))
        assert series.radius is None
        assert np.array_equal(series.data, full.data)

    def test_header_layout(self):
        payload = encode_path(ScalarPath(4, 0.25, np.array([1.0, -2.0])), seed=9)
        assert payload[:5] == b"MSQG1" and payload[5:6] == b"P"
        path, seed = decode_path(payload)
        assert (path.k0, path.dt, seed) == (4, 0.25, 9)
        assert path.values.tolist() == [1.0, -2.0]

    def test_bad_magic(self):
        with pytest.raises(CheckpointError, match="not an MSQG1"):
            decode_series(b"XXXXX" + encode_series(self.series)[5:])

    def test_wrong_kind(self):
        with pytest.raises(CheckpointError):
            decode_series(encode_path(ScalarPath(0, 0.1, np.zeros(3))))

    def test_truncated(self):
        payload = encode_series(self.series)
        with pytest.raises(CheckpointError, match="truncated"):
            decode_series(payload[:-8])
        with pytest.raises(CheckpointError):
            decode_series(payload[:10])


class TestCheckpointWriter:
    """Directory-level writes and reads."""

    def setup_method(self):
        self.logger = MockLogger()
        self.grid = PeriodicGrid(16)

    def test_series_tail_written(self, tmp_path):
        writer = CheckpointWriter(tmp_path / "ckpt", seed=5, logger=self.logger)
        series = FieldSeries.zeros(VectorField, self.grid, 0, 10, 0.1, 3)
        series.data[:] = np.arange(10)[:, None, None, None]
        path, error = writer.write_series("y_q1", series, samples=4)
        assert error is None and path.endswith("y_q1.msqg")
        restored, seed = CheckpointWriter.read(path)
        assert seed == 5 and (restored.k0, len(restored)) == (6, 4)
        assert np.array_equal(restored.data, series.data[6:])
        self.logger.debug.assert_called()

    def test_modes_and_path(self, tmp_path):
        writer = CheckpointWriter(tmp_path, seed=1)
        noise = sample_noise(self.grid, 0.1, 0.5, 0.01, 8, seed=1)
        z = solve_stokes_z(noise, 0.1)
        path, _ = writer.write_modes("z_modes", z)
        restored, _ = CheckpointWriter.read(path)
        assert np.array_equal(restored.coeffs, z.coeffs)
        assert np.array_equal(restored.modes, z.modes)
        path, _ = writer.write_path("B", ScalarPath(0, 0.01, np.linspace(0, 1, 5)))
        B, _ = CheckpointWriter.read(path)
        assert np.array_equal(B.values, np.linspace(0, 1, 5))

    def test_write_failure_returns_error(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        writer = CheckpointWriter(blocker / "sub", logger=self.logger)
        path, error = writer.write_path("B", ScalarPath(0, 0.1, np.zeros(2)))
        assert path is None and error
        self.logger.error.assert_called_once()

    def test_read_rejects_garbage(self, tmp_path):
        target = tmp_path / "junk.msqg"
        target.write_bytes(b"MSQG1Q" + bytes(64))
        with pytest.raises(CheckpointError, match="unknown checkpoint kind"):
            CheckpointWriter.read(target)


class TestReportSaveManager:
    """report.json and CSV traces."""

    def setup_method(self):
        self.stages = [
            {"q": 0, "energy_trace": {"t": [0.0, 0.1], "e": [10.0, 10.1], "energy": [0.0, 0.0], "ratio": [1.0, 1.0]}},
            {"q": 1, "energy_trace": {"t": [0.1], "e": [10.1], "energy": [9.0], "ratio": [0.9]},
             "stress": {"components": {"transport": 0.5, "nash": 0.25}, "ratio": 0.75}},
        ]

    def test_plain_values(self):
        out = _plain({"a": np.float64(1.5), "b": np.arange(2), 3: float("inf"), "c": (1, np.int64(2))})
        assert out == {"a": 1.5, "b": [0, 1], "3": "inf", "c": [1, 2]}

    def test_save_report(self, tmp_path):
        manager = ReportSaveManager(str(tmp_path))
        path, error = manager.save_report({"value": np.float64(2.0), "nan": float("nan")})
        assert error is None
        with open(path, encoding="utf-8") as f:
            assert json.load(f) == {"value": 2.0, "nan": "nan"}

    def test_energy_trace(self, tmp_path):
        manager = ReportSaveManager(str(tmp_path))
        path, error = manager.save_energy_trace(self.stages)
        assert error is None
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["q", "t", "e", "solution_energy", "gap_ratio"]
        assert len(rows) == 4
        assert rows[3] == ["1", "0.1", "10.1", "9.0", "0.9"]

    def test_stress_norms_skip_stages_without_stress(self, tmp_path):
        manager = ReportSaveManager(str(tmp_path))
        path, _ = manager.save_stress_norms(self.stages)
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows == [["q", "transport", "nash", "ratio"], ["1", "0.5", "0.25", "0.75"]]

    def test_unique_names_without_overwrite(self, tmp_path):
        manager = ReportSaveManager(str(tmp_path), overwrite=False)
        first, _ = manager.save_report({"a": 1})
        second, _ = manager.save_report({"a": 2})
        assert first.endswith("report.json")
        assert second.endswith("report_001.json")


class TestRunHistory:
    """The growing report and its latest snapshot."""

    def setup_method(self):
        self.logger = MockLogger()
        self.history = RunHistory(self.logger, {"run": {"seed": 1}})

    def test_snapshots_are_written(self):
        self.history.update_state(schedule={"Q": 2})
        self.history.update_state({"q": 0, "value": np.float64(1.0)})
        assert self.history.updates == 2
        latest = self.history.latest
        assert latest["schema"] == REPORT_SCHEMA
        assert latest["config"] == {"run": {"seed": 1}}
        assert latest["stages"] == [{"q": 0, "value": 1.0}]
        assert self.logger.write_json.call_count == 2
        self.logger.write_json.assert_called_with(latest)

    def test_only_the_latest_snapshot_is_kept(self):
        assert self.history.latest is None
        for q in range(5):
            self.history.update_state({"q": q, "energy_trace": {"t": [0.0] * 100}})
        assert [s["q"] for s in self.history.latest["stages"]] == list(range(5))
        assert not hasattr(self.history, "state_history")
        assert not hasattr(self.history, "restore_state_by_index")

    def test_sections_replace_earlier_values(self):
        self.history.update_state({"q": 0}, stopping={"value": 1.0})
        self.history.update_state(stopping={"value": 0.5})
        assert self.history.latest["stopping"] == {"value": 0.5}
        assert self.history.create_state_snapshot() == self.history.latest
        assert RunState().to_dict() == {"schema": REPORT_SCHEMA, "stages": []}

# test_interface.py

import json
from unittest.mock import Mock

import pytest

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from msqgforge import Forge
from msqgforge.config import RunConfig
from msqgforge.display import Display


def short_run(directory, workers=1, **noise):
    """Two stages at N = 128 on a short window, without checkpoints."""
    return RunConfig.from_dict({
        "run": {"seed": 3, "workers": workers, "horizon": 0.16, "window_start": 0.1},
        "schedule": {"Q": 2},
        "grid": {"N": 128},
        "noise": {"probes": 4, **noise},
        "output": {"directory": str(directory), "checkpoints": False},
    })


def row(block, id):
    return next(r for r in block["inductive"]["rows"] if r["id"] == id)


class TestForgeRun:
    """A full base step plus one inductive step on the zero-noise realization."""

    @pytest.fixture(scope="class")
    def run(self, tmp_path_factory):
        out = tmp_path_factory.mktemp("zero_noise")
        config = short_run(out, amplitude=0.0)
        report = Forge(config, display=Display(quiet=True), logger=Mock()).run()
        first = (out / "report.json").read_bytes()
        Forge(config.with_overrides(workers=2), display=Display(quiet=True), logger=Mock()).run()
        second = (out / "report.json").read_bytes()
        return config, report, first, second

    def test_report_layout(self, run):
        config, report, _, _ = run
        assert report["schema"] == "msqg-report/1"
        assert [s["q"] for s in report["stages"]] == [0, 1]
        assert report["stopping"]["value"] > 0.16
        assert report["windows"]["t_start"][1] == pytest.approx(0.1, abs=report["windows"]["dt"])

    def test_perturbation_is_pure_and_solenoidal(self, run):
        config, report, _, _ = run
        checks = report["stages"][1]["checks"]
        assert checks["w_outside_band"] == 0.0
        assert checks["w_divergence"] <= config.tolerances.divergence
        assert checks["w_imaginary"] <= config.tolerances.imaginary
        assert "split_w_z" in checks

    def test_energy_quadrature_and_window(self, run):
        config, report, _, _ = run
        stage = report["stages"][1]
        assert stage["checks"]["energy_quadrature"] <= config.tolerances.energy_quadrature
        assert row(stage, "energy_low")["holds"]
        assert row(stage, "energy_high")["holds"]
        assert len(stage["energy_trace"]["t"]) == len(stage["energy_trace"]["energy"])

    def test_residual_after_one_step(self, run):
        config, report, _, _ = run
        residual = report["stages"][1]["residual"]
        assert residual["samples"] > 0
        assert residual["relative"] <= config.tolerances.residual

    def test_flows_are_reported(self, run):
        _, report, _, _ = run
        flows = report["stages"][1]["flows"]
        assert flows
        assert all(f["n_steps"] == 1 and f["jacobian_min"] > 0 for f in flows)

    def test_report_independent_of_workers(self, run):
        _, _, first, second = run
        assert first == second
        assert "workers" not in json.loads(first)["config"]["run"]

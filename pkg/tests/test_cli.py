# test_cli.py

import json
from unittest.mock import Mock

import pytest

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from msqgforge import cli
from msqgforge.errors import (
    CFLViolation,
    GeometryUnavailable,
    InsufficientHistory,
    MissingTimeHalo,
    NumericalFault,
    OutsideBall,
    StrictModeFailure,
)
from msqgforge.logger import Logger

EXAMPLE_DIR = os.path.join(os.path.dirname(__file__), "..", "example")


def fake_forge(monkeypatch, **behaviour):
    forge = Mock()
    for name, value in behaviour.items():
        getattr(forge, name).side_effect = value
    monkeypatch.setattr(cli, "Forge", Mock(return_value=forge))
    return forge


class TestCommandLine:
    """Argument handling and exit codes."""

    def test_parser_defaults(self):
        args = cli.build_parser().parse_args([])
        assert args.command == "run"
        assert args.strict is None and args.window_start is None

    def test_overrides_reach_config(self):
        args = cli.build_parser().parse_args(["--mode", "multiplicative", "--stages", "3", "--strict",
                                              "--window-start", "0.5", "--horizon", "0.8"])
        config = cli.resolve_config(args)
        assert config.mode == "multiplicative"
        assert config.schedule.Q == 3
        assert config.strict is True
        assert (config.window_start, config.horizon) == (0.5, 0.8)

    def test_list_catalogue(self):
        assert cli.main(["verify", "--list", "--quiet"]) == cli.EXIT_OK

    def test_band_too_large_for_grid(self, tmp_path):
        assert cli.main(["verify", "--grid", "16", "--out", str(tmp_path), "--quiet"]) == cli.EXIT_CONFIG

    def test_missing_config_file(self, tmp_path):
        assert cli.main(["--config", str(tmp_path / "absent.toml"), "--quiet"]) == cli.EXIT_CONFIG

    def test_run_success(self, monkeypatch):
        forge = fake_forge(monkeypatch)
        assert cli.main(["--quiet"]) == cli.EXIT_OK
        forge.run.assert_called_once()

    def test_strict_failure(self, monkeypatch):
        fake_forge(monkeypatch, run=StrictModeFailure("stage 1: stress ratio 2"))
        assert cli.main(["--strict", "--quiet"]) == cli.EXIT_INVARIANT

    def test_numerical_fault(self, monkeypatch):
        fake_forge(monkeypatch, run=NumericalFault("NaN in y_1"))
        assert cli.main(["--quiet"]) == cli.EXIT_NUMERICAL

    @pytest.mark.parametrize("error", [
        OutsideBall("R/ρ at distance 0.31 from the identity"),
        CFLViolation("flow 3: max|v|·h = 0.2 exceeds grid spacing 0.077"),
        InsufficientHistory("drift covers [0, 0.3] but flow 4 spans [0.2, 0.35]"),
        MissingTimeHalo("∂_t needs one sample past k=40"),
        GeometryUnavailable("no direction set"),
    ])
    def test_run_errors_map_to_invariant_exit(self, monkeypatch, capsys, error):
        fake_forge(monkeypatch, run=error)
        assert cli.main(["--quiet"]) == cli.EXIT_INVARIANT
        assert "Error" in capsys.readouterr().out

    def test_verify_flag_and_failed_invariant(self, monkeypatch):
        forge = fake_forge(monkeypatch)
        forge.verify.return_value = Mock(holds=False)
        assert cli.main(["--verify", "--quiet"]) == cli.EXIT_INVARIANT
        forge.verify.return_value = Mock(holds=True)
        assert cli.main(["verify", "--quiet"]) == cli.EXIT_OK
        forge.run.assert_not_called()


class TestShippedConfigs:
    """The example configs run to completion from the command line."""

    @pytest.mark.parametrize("name", ["demo_additive.toml", "demo_multiplicative.toml"])
    def test_demo_config_runs(self, tmp_path, monkeypatch, name):
        monkeypatch.chdir(tmp_path)
        config = os.path.join(EXAMPLE_DIR, name)
        code = cli.main(["run", "--config", config, "--stages", "2", "--grid", "128", "--out", str(tmp_path / "out"),
                         "--quiet"])
        assert code == cli.EXIT_OK
        report = json.loads((tmp_path / "out" / "report.json").read_text())
        assert [s["q"] for s in report["stages"]] == [0, 1]
        assert report["stopping"]["value"] > report["windows"]["t_start"][-1]


class TestLogger:
    """Log lines and the JSON run trace."""

    def test_trace_written(self, tmp_path):
        trace = tmp_path / "trace" / "run_trace.json"
        logger = Logger("msqg-test", logging_enabled=False, trace_file=str(trace))
        logger.write_json({"stages": [{"q": 0}]})
        assert json.loads(trace.read_text()) == {"stages": [{"q": 0}]}

    def test_no_trace_without_path(self, tmp_path):
        logger = Logger("msqg-test")
        logger.write_json({"q": 0})
        logger.info("quiet")
        assert logger.json_trace_path is None

    def test_log_file(self, tmp_path):
        log_file = tmp_path / "logs" / "run.log"
        logger = Logger("msqg-file", logging_enabled=True, log_file=str(log_file))
        logger.info("stage 1 built")
        assert "stage 1 built" in log_file.read_text()
        assert logger.json_trace_path == os.path.join(str(tmp_path / "logs"), "run_trace.json")

    def test_stage_prefix(self, tmp_path):
        log_file = tmp_path / "run.log"
        logger = Logger("msqg-stage", logging_enabled=True, log_file=str(log_file), trace_file=str(tmp_path / "t.json"))
        logger.at_stage(1)
        logger.warning("stress ratio 1.2")
        logger.at_stage(None)
        logger.info("run finished")
        lines = log_file.read_text().splitlines()
        assert lines[-2].endswith("WARNING - [stage 1] stress ratio 1.2")
        assert lines[-1].endswith("INFO - run finished")

    def test_trace_replaced_whole(self, tmp_path):
        trace = tmp_path / "run_trace.json"
        logger = Logger("msqg-trace", trace_file=str(trace))
        logger.write_json({"stages": [{"q": 0}, {"q": 1}]})
        logger.write_json({"stages": [{"q": 0}]})
        assert json.loads(trace.read_text()) == {"stages": [{"q": 0}]}
        assert sorted(p.name for p in tmp_path.iterdir()) == ["run_trace.json"]

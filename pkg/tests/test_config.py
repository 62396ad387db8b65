# test_config.py

import pytest

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from msqgforge.config import RunConfig, load_config
from msqgforge.defaults import DEFAULT_CONFIG
from msqgforge.errors import ConfigError


class TestRunConfig:
    """Merging, validation and overrides of the run configuration."""

    def test_defaults_are_demonstration_regime(self):
        config = RunConfig.from_dict()
        assert config.mode == "additive"
        assert (config.schedule.a, config.schedule.b, config.schedule.Q) == (5, 2, 2)
        assert config.schedule.beta == 0.51
        assert config.grid.N == 128
        assert config.energy.kind == "affine"
        assert config.strict is False
        assert config.workers == 1

    def test_partial_table_merges_onto_defaults(self):
        config = RunConfig.from_dict({"schedule": {"Q": 3}, "run": {"seed": 7}})
        assert config.schedule.Q == 3
        assert config.seed == 7
        assert config.schedule.a == DEFAULT_CONFIG["schedule"]["a"]

    def test_unknown_key_names_dotted_path(self):
        with pytest.raises(ConfigError, match="schedule.zeta"):
            RunConfig.from_dict({"schedule": {"zeta": 1}})

    def test_unknown_table_rejected(self):
        with pytest.raises(ConfigError, match="plot"):
            RunConfig.from_dict({"plot": {}})

    def test_scalar_where_table_expected(self):
        with pytest.raises(ConfigError, match="must be a table"):
            RunConfig.from_dict({"grid": 64})

    def test_wrong_types_rejected(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"grid": {"N": "big"}})
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"schedule": {"a": 5.5}})
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"run": {"seed": True}})

    @pytest.mark.parametrize("data, message", [
        ({"energy": {"times": "12", "values": [1.0, 2.0]}}, "energy.times must be a list"),
        ({"energy": {"values": "34"}}, "energy.values must be a list"),
        ({"energy": {"times": ["x"]}}, r"energy.times\[0\] must be a number"),
        ({"energy": {"values": [6.0, None]}}, r"energy.values\[1\] must be a number"),
        ({"noise": {"mc_levels": [1.5, "2"]}}, r"noise.mc_levels\[1\] must be a number"),
        ({"noise": {"mc_levels": 2.0}}, "noise.mc_levels must be a list"),
        ({"output": {"log_file": 5}}, "output.log_file must be a string"),
        ({"output": {"directory": ["out"]}}, "output.directory must be a string"),
        ({"output": {"logging": "false"}}, "output.logging must be true or false"),
        ({"run": {"strict": 1}}, "run.strict must be true or false"),
    ])
    def test_list_and_text_fields_validated(self, data, message):
        with pytest.raises(ConfigError, match=message):
            RunConfig.from_dict(data)

    def test_valid_lists_and_log_file(self):
        config = RunConfig.from_dict({"energy": {"times": [-2, 0.5], "values": [6, 7.5]},
                                      "noise": {"mc_levels": [2]}, "output": {"log_file": "out/run.log"}})
        assert config.energy.times == [-2.0, 0.5] and config.energy.values == [6.0, 7.5]
        assert config.noise.mc_levels == [2.0]
        assert config.output.log_file == "out/run.log"
        assert RunConfig.from_dict({"output": {"log_file": None}}).output.log_file is None

    def test_range_checks(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"run": {"mode": "both"}})
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"run": {"workers": 0}})
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"noise": {"delta": 0.3}})
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"grid": {"samples_per_tau": 4}})
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"tolerances": {"residual": 0.0}})

    def test_window_start_must_precede_horizon(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"run": {"horizon": 0.5, "window_start": 0.6}})

    def test_round_trip(self):
        config = RunConfig.from_dict({"run": {"mode": "multiplicative", "horizon": 0.25},
                                      "noise": {"mc_levels": [2.0, 4.0]}})
        assert RunConfig.from_dict(config.to_dict()) == config

    def test_overrides_apply_and_ignore_none(self):
        config = RunConfig.from_dict().with_overrides(stages=3, grid=64, seed=None, strict=True,
                                                      paths=200, window_start=0.1)
        assert config.schedule.Q == 3
        assert config.grid.N == 64
        assert config.seed == 0
        assert config.strict is True
        assert config.noise.mc_paths == 200
        assert config.window_start == 0.1

    def test_unknown_override(self):
        with pytest.raises(ConfigError, match="Unknown override"):
            RunConfig.from_dict().with_overrides(colour="red")

    def test_replace_energy(self):
        config = RunConfig.from_dict().replace_energy(d1=2.0)
        assert config.energy.d1 == 2.0
        assert config.energy.d0 == 10.0


class TestLoadConfig:
    """TOML loading."""

    def test_load_nested_tables(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text('[run]\nmode = "multiplicative"\nseed = 3\n\n[schedule]\nL = 4.0\nQ = 2\n')
        config = load_config(str(path))
        assert config.mode == "multiplicative"
        assert config.seed == 3
        assert config.schedule.L == 4.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(str(tmp_path / "absent.toml"))

    def test_unparsable_file(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("[run\nmode = ")
        with pytest.raises(ConfigError, match="Could not parse"):
            load_config(str(path))

    @pytest.mark.parametrize("name", ["demo_additive.toml", "demo_multiplicative.toml"])
    def test_example_configs_load(self, name):
        path = os.path.join(os.path.dirname(__file__), '..', 'example', name)
        config = load_config(path)
        assert config.mode == name[len("demo_"):-len(".toml")]
        assert config.window_start < config.horizon

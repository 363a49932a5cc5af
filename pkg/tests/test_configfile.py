"""Tests for flat key = value experiment configs."""

import pytest

from nemsim.errors import ConfigError, UnknownExperimentError
from nemsim.runner.configfile import default_config, load_config, validate_config
from nemsim.schemas.system import NonlinearityKind, SystemParams


class TestDefaults:
    """Configs without settings."""

    def test_empty_config(self):
        """An empty config yields the published defaults."""
        cfg = default_config("fig3a")
        assert cfg.experiment == "fig3a"
        assert cfg.system == SystemParams()
        assert cfg.sweeps == {}
        assert not cfg.fast

    def test_missing_name(self):
        """The experiment must be named somewhere."""
        with pytest.raises(ConfigError, match="experiment.name"):
            validate_config("system.n_max = 3\n")


class TestSettings:
    """Keys mapped onto the configuration models."""

    def test_system_field(self):
        """A system key sets the field and records its line."""
        cfg = validate_config("system.omega1_mhz = 90\n", experiment="fig3a")
        assert cfg.system.omega1_mhz == 90.0
        assert cfg.sources["system.omega1_mhz"] == "config line 1"

    def test_alias_sets_both(self):
        """g_mhz is shorthand for g1_mhz and g2_mhz."""
        cfg = validate_config("system.g_mhz = 4.5\n", experiment="fig3a")
        assert (cfg.system.g1_mhz, cfg.system.g2_mhz) == (4.5, 4.5)

    def test_nested_fields(self):
        """Nested models use further dots."""
        text = "system.nonlinearity1.kind = quartic\nsystem.nonlinearity1.strength_mhz = 0.01\nsystem.thermal.chi_hz = 10\n"
        cfg = validate_config(text, experiment="fig3a")
        assert cfg.system.nonlinearity1.kind is NonlinearityKind.QUARTIC
        assert cfg.system.nonlinearity1.strength_mhz == 0.01
        assert cfg.system.thermal.chi_hz == 10.0

    def test_comments_and_blanks(self):
        """Comments and blank lines are ignored."""
        text = "# device\n\nexperiment.name = fig6  # quartic\nsweep.u_mhz = 1, 2\n"
        cfg = validate_config(text)
        assert cfg.experiment == "fig6"
        assert cfg.sweeps == {"u_mhz": (1.0, 2.0)}

    def test_run_section(self):
        """run.* keys set top-level options."""
        text = "experiment.name = fig6\nrun.fast = true\nrun.workers = 3\nrun.output_dir = out\n"
        cfg = validate_config(text)
        assert cfg.fast
        assert cfg.workers == 3
        assert cfg.output_dir == "out"

    def test_none_values(self):
        """'none' clears optional fields."""
        cfg = validate_config("integrator.step_us = none\n", experiment="fig6")
        assert cfg.integrator.step_us is None

    def test_knobs(self):
        """experiment.<knob> overrides registry knobs."""
        cfg = validate_config("experiment.name = fig6\nexperiment.n_max = 12\n")
        assert cfg.knobs == {"n_max": 12.0}

    def test_cli_overrides_file(self):
        """Explicit arguments win over the file."""
        cfg = validate_config("experiment.name = fig2\nrun.fast = false\n", experiment="fig6", fast=True)
        assert cfg.experiment == "fig6"
        assert cfg.fast

    def test_load_from_file(self, tmp_path):
        """Configs are read from disk."""
        path = tmp_path / "run.cfg"
        path.write_text("experiment.name = tableA\n", encoding="utf-8")
        assert load_config(str(path)).experiment == "tableA"


class TestErrors:
    """Errors carry the offending line and column."""

    def test_missing_equals(self):
        """Every line needs '='."""
        with pytest.raises(ConfigError) as info:
            validate_config("experiment.name fig6\n")
        assert (info.value.line, info.value.column) == (1, 1)

    def test_duplicate_key(self):
        """Keys may appear once."""
        with pytest.raises(ConfigError, match="duplicate") as info:
            validate_config("experiment.name = fig6\nexperiment.name = fig2\n")
        assert info.value.line == 2

    def test_unknown_section(self):
        """Only known sections are accepted."""
        with pytest.raises(ConfigError, match="unknown section"):
            validate_config("device.omega = 1\n", experiment="fig6")

    def test_unknown_field(self):
        """System keys must name a field."""
        with pytest.raises(ConfigError, match="unknown field"):
            validate_config("system.omega3_mhz = 1\n", experiment="fig6")

    def test_invalid_value_position(self):
        """Validation errors point at the value."""
        with pytest.raises(ConfigError) as info:
            validate_config("system.gamma1_hz = -5\n", experiment="fig6")
        assert (info.value.line, info.value.column) == (1, 20)

    def test_unknown_experiment(self):
        """Unknown names list the registry."""
        with pytest.raises(UnknownExperimentError) as info:
            validate_config("experiment.name = nope\n")
        assert (info.value.line, info.value.column) == (1, 19)
        assert "fig2" in info.value.known

    def test_bad_sweep_value(self):
        """Non-numeric sweep entries are located by column."""
        with pytest.raises(ConfigError) as info:
            validate_config("sweep.g_mhz = 0, x, 10\n", experiment="fig2")
        assert info.value.column == 18

    def test_unknown_axis(self):
        """Sweeps must use the experiment's axes."""
        with pytest.raises(ConfigError, match="not a sweep axis") as info:
            validate_config("experiment.name = fig2\nsweep.bogus = 1\n")
        assert (info.value.line, info.value.column) == (2, 15)

    def test_unsorted_sweep(self):
        """Sweep values must ascend."""
        with pytest.raises(ConfigError, match="sorted"):
            validate_config("sweep.g_mhz = 10, 0\n", experiment="fig2")

    def test_unknown_knob(self):
        """Knobs must belong to the experiment."""
        with pytest.raises(ConfigError, match="unknown knob"):
            validate_config("experiment.steps = 3\n", experiment="fig6")

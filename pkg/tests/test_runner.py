"""Tests for the experiment engine."""

import pytest

from nemsim.config import Settings
from nemsim.progress.events import EventType, event_store
from nemsim.runner.configfile import default_config, validate_config
from nemsim.runner.engine import (
    build_metadata,
    effective_config,
    run_experiment,
    run_to_file,
    sweep_points,
    sweep_values,
)
from nemsim.runner.experiments import fig5b_spec
from nemsim.runner.output import read_table
from nemsim.runner.registry import get_experiment
from nemsim.runner.verify import check_tim_windows


class TestSweeps:
    """Sweep grids and points."""

    def test_first_axis_slowest(self):
        """Points enumerate the Cartesian product with the first axis outermost."""
        points = sweep_points({"a": (1.0, 2.0), "b": (3.0, 4.0)})
        assert points == [
            {"a": 1.0, "b": 3.0},
            {"a": 1.0, "b": 4.0},
            {"a": 2.0, "b": 3.0},
            {"a": 2.0, "b": 4.0},
        ]

    def test_fast_and_override(self):
        """Fast grids apply unless the config sweeps the axis itself."""
        entry = get_experiment("fig6")
        assert sweep_values(default_config("fig6", fast=True), entry) == {"u_mhz": (0.5, 4.5, 8.5)}
        cfg = validate_config("sweep.u_mhz = 2\n", experiment="fig6", fast=True)
        assert sweep_values(cfg, entry) == {"u_mhz": (2.0,)}

    def test_knob_merge(self):
        """Config knobs override registry defaults."""
        entry = get_experiment("fig6")
        cfg = effective_config(validate_config("experiment.n_max = 12\n", experiment="fig6"), entry)
        assert cfg.knobs == {"omega_mhz": 85.0, "n_max": 12.0}


class TestTimPreset:
    """Hamiltonian of the TIM digital simulation."""

    def test_default_field_is_half_the_coupling(self):
        """Default knobs give Lambda = 2b = Gamma."""
        entry = get_experiment("fig5b")
        cfg = effective_config(default_config("fig5b"), entry)
        gamma = -0.1153
        spec = fig5b_spec(cfg, gamma)
        (coupling,) = spec.two_body
        assert coupling.coefficient_mhz == pytest.approx(gamma)
        for term in spec.one_body:
            assert 2.0 * term.coefficient_mhz == pytest.approx(coupling.coefficient_mhz)

    def test_tim_window_check(self):
        """The default preset still compiles to 20 + 40 windows at N = 10."""
        passed, detail = check_tim_windows()
        assert passed, detail


class TestRunExperiment:
    """End-to-end runs of a cheap experiment."""

    def test_fig6_fast(self, clean_events):
        """Three rows with the diagonal shift equal to 2U."""
        table = run_experiment(default_config("fig6", fast=True, workers=1))
        assert len(table.rows) == 3
        assert table.column("u_mhz") == [0.5, 4.5, 8.5]
        assert table.column("delta_diagonal_mhz") == pytest.approx([1.0, 9.0, 17.0])
        types = [event.type for event in event_store.get_events()]
        assert types[0] is EventType.RUN_STARTED
        assert types.count(EventType.POINT_FINISHED) == 3

    def test_metadata(self):
        """Metadata echoes every parameter and its origin."""
        cfg = validate_config("system.g_mhz = 4\n", experiment="fig6", fast=True)
        entry = get_experiment("fig6")
        metadata = build_metadata(effective_config(cfg, entry), entry, sweep_values(cfg, entry))
        assert metadata["experiment"] == "fig6"
        assert metadata["sweep.u_mhz"] == "0.5, 4.5, 8.5"
        assert metadata["experiment.n_max"] == "10"
        assert metadata["system.g1_mhz"] == "4.0"
        assert metadata["source.system.g2_mhz"] == "config line 1"
        assert metadata["source.system.omega1_mhz"].startswith("published")

    def test_file_is_deterministic(self, tmp_path, clean_events):
        """The same config writes the same file."""
        cfg = default_config("fig6", fast=True, workers=1)
        first = run_to_file(cfg, tmp_path / "a")
        second = run_to_file(cfg, tmp_path / "b")
        assert first.name == "fig6.csv"
        assert first.read_text() == second.read_text()
        table = read_table(first)
        assert table.headers == get_experiment("fig6").headers
        assert table.metadata["experiment"] == "fig6"


class TestSettings:
    """Environment settings."""

    def test_worker_cap(self):
        """NEMSIM_MAX_WORKERS caps the requested pool size."""
        assert Settings(max_workers=2).worker_count(8) == 2
        assert Settings().worker_count(3) == 3

    def test_from_environment(self, monkeypatch):
        """Settings are read with the NEMSIM_ prefix."""
        monkeypatch.setenv("NEMSIM_OUTPUT_DIR", "elsewhere")
        assert Settings().output_dir == "elsewhere"

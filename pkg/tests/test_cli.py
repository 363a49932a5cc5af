"""Tests for the nemsim command line."""

import pytest

from nemsim.main import EXIT_INVALID, EXIT_OK, main, parse_args
from nemsim.runner.output import read_table


@pytest.fixture(autouse=True)
def _events(clean_events):
    yield


class TestParseArgs:
    """Argument parsing."""

    def test_run_defaults(self):
        """--fast stays unset unless given so the config file can decide."""
        args = parse_args(["run", "fig6"])
        assert args.experiment == "fig6"
        assert args.fast is None
        assert args.workers is None

    def test_command_required(self):
        """A subcommand is mandatory."""
        with pytest.raises(SystemExit):
            parse_args([])


class TestCommands:
    """End-to-end command behavior."""

    def test_list(self, capsys):
        """list prints every experiment and marks slow ones."""
        assert main(["list"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "fig6" in out
        assert "(slow)" in out

    def test_unknown_experiment(self, capsys):
        """Unknown experiments exit with the invalid-input code."""
        assert main(["run", "nope"]) == EXIT_INVALID
        assert "unknown experiment 'nope'" in capsys.readouterr().err

    def test_run_fast(self, tmp_path, capsys):
        """A fast run writes <out>/<experiment>.csv."""
        assert main(["run", "fig6", "--fast", "--workers", "1", "--out", str(tmp_path)]) == EXIT_OK
        path = tmp_path / "fig6.csv"
        assert capsys.readouterr().out.strip() == str(path)
        assert len(read_table(path).rows) == 3

    def test_run_with_config(self, tmp_path):
        """Config files set the output directory and sweep."""
        config = tmp_path / "fig6.cfg"
        out = tmp_path / "results"
        config.write_text(f"run.output_dir = {out}\nsweep.u_mhz = 1, 2\n", encoding="utf-8")
        assert main(["run", "fig6", "--config", str(config), "--workers", "1"]) == EXIT_OK
        assert read_table(out / "fig6.csv").column("u_mhz") == [1.0, 2.0]

    def test_bad_config(self, tmp_path, capsys):
        """Config errors report the position and exit with code 1."""
        config = tmp_path / "bad.cfg"
        config.write_text("system.gamma1_hz = -5\n", encoding="utf-8")
        assert main(["run", "fig6", "--config", str(config)]) == EXIT_INVALID
        assert "line 1, column 20" in capsys.readouterr().err

    def test_verify_subset(self, capsys):
        """Named fast checks pass."""
        assert main(["verify", "spin1_mapping", "compiler_identities"]) == EXIT_OK
        assert "2/2 checks passed" in capsys.readouterr().out

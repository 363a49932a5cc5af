"""Tests for the experiment registry."""

import pickle

import pytest

from nemsim.errors import UnknownExperimentError
from nemsim.runner.registry import CATALOG, _log_grid, get_all_experiments, get_experiment


class TestRegistry:
    """Registry lookups and entry consistency."""

    def test_known_names(self):
        """Every reproducible experiment is registered."""
        expected = {"fig2", "fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig6", "fig7", "tableA", "thermal"}
        assert set(get_all_experiments()) == expected

    def test_unknown_name(self):
        """Unknown names raise with the list of known ones."""
        with pytest.raises(UnknownExperimentError) as info:
            get_experiment("fig99")
        assert info.value.known == sorted(CATALOG)

    def test_copy_is_independent(self):
        """get_all_experiments returns a copy."""
        get_all_experiments().pop("fig2")
        assert "fig2" in CATALOG

    @pytest.mark.parametrize("name", sorted(CATALOG))
    def test_entry_consistency(self, name):
        """Unique headers, sorted non-empty grids, picklable point functions."""
        entry = get_experiment(name)
        assert entry.name == name
        assert len(set(entry.headers)) == len(entry.headers)
        assert entry.axes
        for axis in entry.axes:
            for grid in (axis.values, axis.fast_values):
                assert grid
                assert list(grid) == sorted(grid)
        assert pickle.loads(pickle.dumps(entry.point)) is entry.point


class TestLogGrid:
    """Logarithmic sweep grids."""

    def test_endpoints(self):
        """Grids start and end at the requested values."""
        grid = _log_grid(10.0, 1e5, 8)
        assert len(grid) == 8
        assert grid[0] == 10.0
        assert grid[-1] == pytest.approx(1e5)

    def test_single_value(self):
        """One-point grids hold the lower bound."""
        assert _log_grid(3.0, 9.0, 1) == (3.0,)

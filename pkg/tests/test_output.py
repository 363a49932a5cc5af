"""Tests for CSV result tables."""

from nemsim.runner.output import format_value, read_table, table_to_text, write_table
from nemsim.schemas.experiment import ResultTable


def sample_table() -> ResultTable:
    return ResultTable(
        headers=("g_mhz", "delta_mhz"),
        rows=[(0.0, 0.0), (50.0, -1.0234567890123456)],
        metadata={"experiment": "fig2", "description": "two\nlines"},
    )


class TestOutput:
    """CSV layout and reading back."""

    def test_format_value(self):
        """Twelve significant digits."""
        assert format_value(1.0234567890123456) == "1.02345678901"
        assert format_value(50.0) == "50"
        assert format_value(1e-9) == "1e-09"

    def test_layout(self):
        """Metadata comments first, then the header row."""
        lines = table_to_text(sample_table()).splitlines()
        assert lines[0] == "# experiment: fig2"
        assert lines[1] == "# description: two lines"
        assert lines[2] == "g_mhz,delta_mhz"
        assert lines[4] == "50,-1.02345678901"

    def test_write_creates_directories(self, tmp_path):
        """Parent directories are created and the table reads back."""
        path = write_table(sample_table(), tmp_path / "nested" / "out" / "fig2.csv")
        assert path.exists()
        table = read_table(path)
        assert table.headers == ("g_mhz", "delta_mhz")
        assert table.column("delta_mhz")[1] == -1.02345678901
        assert table.metadata["experiment"] == "fig2"

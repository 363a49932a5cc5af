"""CSV result tables with a commented metadata header."""

import csv
import io
from pathlib import Path

from nemsim.schemas.experiment import ResultTable

SIGNIFICANT_DIGITS = 12


def format_value(value: float) -> str:
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def table_to_text(table: ResultTable) -> str:
    """'# key: value' metadata lines, then the header row and data rows."""
    buffer = io.StringIO()
    for key, value in table.metadata.items():
        text = str(value).replace("\n", " ")
        buffer.write(f"# {key}: {text}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.headers)
    for row in table.rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def write_table(table: ResultTable, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(table_to_text(table), encoding="utf-8")
    return path


def read_table(path: Path | str) -> ResultTable:
    metadata: dict[str, str] = {}
    body: list[str] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            metadata[key] = value
        elif line:
            body.append(line)
    reader = csv.reader(body)
    headers = tuple(next(reader))
    rows = [tuple(float(v) for v in row) for row in reader]
    return ResultTable(headers=headers, rows=rows, metadata=metadata)

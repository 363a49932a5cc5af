"""Run a registry experiment into a ResultTable."""

import itertools
import json
import logging
import time
from functools import partial
from pathlib import Path

from nemsim import __version__
from nemsim.config import get_settings
from nemsim.progress.events import capture_run_finished, capture_run_started
from nemsim.runner.configfile import DEFAULT_SOURCES
from nemsim.runner.output import write_table
from nemsim.runner.overrides import expand
from nemsim.runner.pool import map_points
from nemsim.runner.registry import ExperimentEntry, get_experiment
from nemsim.schemas.experiment import ExperimentConfig, ResultTable

logger = logging.getLogger(__name__)


def effective_config(cfg: ExperimentConfig, entry: ExperimentEntry) -> ExperimentConfig:
    """Knobs merged over the registry defaults."""
    return cfg.model_copy(update={"knobs": {**entry.knobs, **cfg.knobs}})


def sweep_values(cfg: ExperimentConfig, entry: ExperimentEntry) -> dict[str, tuple[float, ...]]:
    values = {}
    for axis in entry.axes:
        default = axis.fast_values if cfg.fast else axis.values
        values[axis.name] = tuple(cfg.sweeps.get(axis.name, default))
    return values


def sweep_points(values: dict[str, tuple[float, ...]]) -> list[dict[str, float]]:
    """Cartesian product, first axis slowest."""
    names = list(values)
    return [dict(zip(names, combo)) for combo in itertools.product(*values.values())]


def _system_source(cfg: ExperimentConfig, field_name: str) -> str:
    for key, source in cfg.sources.items():
        if not key.startswith("system."):
            continue
        paths = expand(key[len("system.") :])
        if any(path.split(".")[0] == field_name for path in paths):
            return source
    return DEFAULT_SOURCES.get(field_name, "default")


def build_metadata(
    cfg: ExperimentConfig, entry: ExperimentEntry, values: dict[str, tuple[float, ...]]
) -> dict[str, str]:
    """Full parameter echo; no wall-clock so identical configs give identical files."""
    metadata = {
        "experiment": entry.name,
        "title": entry.title,
        "description": entry.description,
        "nemsim_version": __version__,
        "fast": str(cfg.fast).lower(),
    }
    for axis, axis_values in values.items():
        metadata[f"sweep.{axis}"] = ", ".join(f"{v:.12g}" for v in axis_values)
    for name, value in sorted(cfg.knobs.items()):
        metadata[f"experiment.{name}"] = f"{value:.12g}"
    system = cfg.system.model_dump(mode="json")
    for name, value in system.items():
        metadata[f"system.{name}"] = json.dumps(value, sort_keys=True)
        metadata[f"source.system.{name}"] = _system_source(cfg, name)
    for section, model in (("pulse", cfg.pulse), ("integrator", cfg.integrator)):
        for name, value in model.model_dump(mode="json").items():
            metadata[f"{section}.{name}"] = json.dumps(value)
    return metadata


def run_experiment(cfg: ExperimentConfig) -> ResultTable:
    """Evaluate every sweep point of ``cfg.experiment`` and assemble the table."""
    entry = get_experiment(cfg.experiment)
    cfg = effective_config(cfg, entry)
    values = sweep_values(cfg, entry)
    points = sweep_points(values)
    workers = get_settings().worker_count(cfg.workers)
    capture_run_started(entry.name, len(points), min(workers, len(points)))

    started = time.perf_counter()
    results = map_points(partial(entry.point, cfg), points, workers, entry.name)
    rows = [row for point_rows in results for row in point_rows]
    if entry.finalize is not None:
        rows = entry.finalize(cfg, rows)
    logger.info(
        "%s: %d point(s), %d row(s) in %.1f s",
        entry.name,
        len(points),
        len(rows),
        time.perf_counter() - started,
    )
    return ResultTable(
        headers=entry.headers,
        rows=rows,
        metadata=build_metadata(cfg, entry, values),
    )


def run_to_file(cfg: ExperimentConfig, output_dir: str | Path) -> Path:
    table = run_experiment(cfg)
    path = write_table(table, Path(output_dir) / f"{cfg.experiment}.csv")
    capture_run_finished(cfg.experiment, len(table.rows), str(path))
    return path

"""Flat ``key = value`` experiment configuration files.

Keys are dotted: ``experiment.name``, ``experiment.<knob>``, ``system.<field>``
(nested models with further dots, e.g. ``system.thermal.chi_hz``),
``pulse.<field>``, ``integrator.<field>``, ``sweep.<axis>`` (comma-separated
values) and ``run.output_dir`` / ``run.fast`` / ``run.workers``. ``#`` starts
a comment.
"""

import logging
import re
from typing import Any

from pydantic import BaseModel, ValidationError

from nemsim.errors import ConfigError, UnknownExperimentError
from nemsim.runner.overrides import check_path, expand, set_path
from nemsim.runner.registry import get_all_experiments, get_experiment
from nemsim.schemas.experiment import ExperimentConfig, IntegratorConfig
from nemsim.schemas.pulses import PulseOptions
from nemsim.schemas.system import SystemParams

logger = logging.getLogger(__name__)

_KEY = re.compile(r"[a-z][a-z0-9_]*(\.[a-z0-9_]+)+")

DEFAULT_SOURCES: dict[str, str] = {
    "omega1_mhz": "published device parameters (NR1 at 85 MHz)",
    "omega2_mhz": "published device parameters (NR2 at 75 MHz)",
    "transmon_mhz": "published device parameters (idle transmon at 10 GHz)",
    "nonlinearity1": "published device parameters (Kerr beta = 3 MHz)",
    "nonlinearity2": "published device parameters (Kerr beta = 3 MHz)",
    "g1_mhz": "published device parameters (g = 6 MHz)",
    "g2_mhz": "published device parameters (g = 6 MHz)",
    "gamma1_hz": "published device parameters (gamma_NR = 50 Hz, T1 = 20 ms)",
    "gamma2_hz": "published device parameters (gamma_NR = 50 Hz, T1 = 20 ms)",
    "gamma1_dephasing_hz": "default: no NR dephasing",
    "gamma2_dephasing_hz": "default: no NR dephasing",
    "gamma_tr_hz": "published device parameters (gamma_TR = 100 kHz)",
    "gamma_tr_dephasing_hz": "published device parameters (gamma_TR,d = 100 kHz)",
    "thermal": "default: zero-temperature baths",
    "n_max": "default Fock cutoff (n_max = 4)",
}

_SECTIONS: dict[str, type[BaseModel]] = {
    "system": SystemParams,
    "pulse": PulseOptions,
    "integrator": IntegratorConfig,
}

_RUN_FIELDS = {"output_dir": "output_dir", "fast": "fast", "workers": "workers"}


def _scalar(value: str) -> str | None:
    return None if value.lower() in ("none", "null") else value


def _floats(value: str, line: int, column: int) -> tuple[float, ...]:
    out = []
    offset = 0
    for token in value.split(","):
        stripped = token.strip()
        col = column + offset + (len(token) - len(token.lstrip()))
        try:
            out.append(float(stripped))
        except ValueError:
            raise ConfigError(f"'{stripped}' is not a number", line, col) from None
        offset += len(token) + 1
    return tuple(out)


def validate_config(
    text: str,
    experiment: str | None = None,
    fast: bool | None = None,
    output_dir: str | None = None,
    workers: int | None = None,
) -> ExperimentConfig:
    """Parse config text; explicit arguments (from the CLI) override the file."""
    data: dict[str, Any] = {"system": {}, "pulse": {}, "integrator": {}, "sweeps": {}, "knobs": {}}
    positions: dict[tuple, tuple[int, int]] = {}
    sources: dict[str, str] = {}
    name: str | None = None
    name_position: tuple[int, int] | None = None
    seen: set[str] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        first = len(content) - len(content.lstrip()) + 1
        if "=" not in content:
            raise ConfigError("expected 'key = value'", lineno, first)
        key_part, value_part = content.split("=", 1)
        key = key_part.strip()
        value = value_part.strip()
        value_col = len(key_part) + 2 + (len(value_part) - len(value_part.lstrip()))
        if not _KEY.fullmatch(key):
            raise ConfigError(f"malformed key '{key}'", lineno, first)
        if not value:
            raise ConfigError(f"missing value for '{key}'", lineno, value_col)
        if key in seen:
            raise ConfigError(f"duplicate key '{key}'", lineno, first)
        seen.add(key)
        section, rest = key.split(".", 1)
        where = (lineno, value_col)
        sources[key] = f"config line {lineno}"

        if section == "experiment":
            if rest == "name":
                name, name_position = value, (lineno, value_col)
            else:
                data["knobs"][rest] = _floats(value, lineno, value_col)[0]
                positions[("knobs", rest)] = where
        elif section in _SECTIONS:
            paths = expand(rest) if section == "system" else (rest,)
            for path in paths:
                parts = path.split(".")
                problem = check_path(_SECTIONS[section], parts)
                if problem:
                    raise ConfigError(problem, lineno, first)
                set_path(data[section], parts, _scalar(value))
                positions[(section, *parts)] = where
        elif section == "sweep":
            data["sweeps"][rest] = _floats(value, lineno, value_col)
            positions[("sweeps", rest)] = where
            positions.setdefault(("sweeps",), where)
        elif section == "run":
            if rest not in _RUN_FIELDS:
                raise ConfigError(f"unknown run setting '{rest}'", lineno, first)
            data[_RUN_FIELDS[rest]] = _scalar(value)
            positions[(_RUN_FIELDS[rest],)] = where
        else:
            raise ConfigError(f"unknown section '{section}'", lineno, first)

    if experiment is not None:
        if name is not None and name != experiment:
            logger.warning("config names '%s'; running '%s' as requested", name, experiment)
        name, name_position = experiment, None
    if name is None:
        raise ConfigError("experiment.name is required")
    try:
        entry = get_experiment(name)
    except UnknownExperimentError as exc:
        line, col = name_position or (None, None)
        raise UnknownExperimentError(name, sorted(get_all_experiments()), line, col) from exc

    for axis in data["sweeps"]:
        if axis not in entry.axis_names:
            line, col = positions[("sweeps", axis)]
            raise ConfigError(
                f"'{axis}' is not a sweep axis of {name} ({', '.join(entry.axis_names)})",
                line,
                col,
            )
    for knob in data["knobs"]:
        if knob not in entry.knobs:
            line, col = positions[("knobs", knob)]
            known = ", ".join(sorted(entry.knobs)) or "none"
            raise ConfigError(f"unknown knob '{knob}' for {name} (known: {known})", line, col)

    if fast is not None:
        data["fast"] = fast
    if output_dir is not None:
        data["output_dir"] = output_dir
    if workers is not None:
        data["workers"] = workers
    data["experiment"] = name
    data["sources"] = sources

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        loc = tuple(str(p) for p in error["loc"])
        line = column = None
        for size in range(len(loc), 0, -1):
            if loc[:size] in positions:
                line, column = positions[loc[:size]]
                break
        raise ConfigError(f"{'.'.join(loc)}: {error['msg']}", line, column) from exc


def load_config(path: str, **overrides: Any) -> ExperimentConfig:
    with open(path, encoding="utf-8") as handle:
        return validate_config(handle.read(), **overrides)


def default_config(experiment: str, **overrides: Any) -> ExperimentConfig:
    return validate_config("", experiment=experiment, **overrides)

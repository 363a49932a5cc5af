"""Dotted field paths and aliases on SystemParams."""

import typing
from typing import Any

from pydantic import BaseModel

from nemsim.errors import ConfigError
from nemsim.schemas.system import SystemParams

# Shorthands that set the same field on both resonators
SYSTEM_ALIASES: dict[str, tuple[str, ...]] = {
    "g_mhz": ("g1_mhz", "g2_mhz"),
    "beta_mhz": ("nonlinearity1.strength_mhz", "nonlinearity2.strength_mhz"),
    "gamma_nr_hz": ("gamma1_hz", "gamma2_hz"),
    "gamma_nr_dephasing_hz": ("gamma1_dephasing_hz", "gamma2_dephasing_hz"),
}


def _model_in(annotation: Any) -> type[BaseModel] | None:
    if isinstance(annotation, type) and issubclass(annotation, BaseModel):
        return annotation
    for arg in typing.get_args(annotation):
        found = _model_in(arg)
        if found is not None:
            return found
    return None


def check_path(model: type[BaseModel], parts: list[str]) -> str | None:
    """Error text if ``parts`` is not a leaf field path of ``model``."""
    info = model.model_fields.get(parts[0])
    if info is None:
        return f"unknown field '{parts[0]}' for {model.__name__}"
    nested = _model_in(info.annotation)
    if len(parts) == 1:
        if nested is not None:
            return f"'{parts[0]}' needs a sub-key (one of {', '.join(nested.model_fields)})"
        return None
    if nested is None:
        return f"'{parts[0]}' has no sub-keys"
    return check_path(nested, parts[1:])


def set_path(tree: dict, parts: list[str], value: Any) -> None:
    for part in parts[:-1]:
        child = tree.get(part)
        if not isinstance(child, dict):
            child = tree[part] = {}
        tree = child
    tree[parts[-1]] = value


def expand(key: str) -> tuple[str, ...]:
    return SYSTEM_ALIASES.get(key, (key,))


def is_system_axis(name: str) -> bool:
    return name in SYSTEM_ALIASES or check_path(SystemParams, name.split(".")) is None


def with_overrides(params: SystemParams, updates: dict[str, Any]) -> SystemParams:
    """Copy of ``params`` with fields (or aliases) replaced and re-validated."""
    data = params.model_dump()
    for key, value in updates.items():
        for path in expand(key):
            parts = path.split(".")
            problem = check_path(SystemParams, parts)
            if problem:
                raise ConfigError(problem)
            set_path(data, parts, value)
    return SystemParams.model_validate(data)

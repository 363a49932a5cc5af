"""Integrator, experiment and result-table schemas."""

import math
from enum import Enum

from pydantic import BaseModel, Field, field_validator, model_validator

from nemsim.schemas.pulses import PulseOptions
from nemsim.schemas.system import SystemParams


class Frame(str, Enum):
    """Integration frame."""

    INTERACTION = "interaction"
    LAB = "lab"


class IntegratorConfig(BaseModel):
    """Fixed-step RK4 settings."""

    model_config = {"frozen": True}

    frame: Frame = Field(default=Frame.INTERACTION)
    step_us: float | None = Field(
        default=None, gt=0, description="Explicit step; derived from the fastest frequency when unset"
    )
    resolution: float = Field(
        default=40.0, ge=4, description="Samples per period of the fastest oscillation"
    )
    output_stride: int = Field(default=1, ge=1, description="Keep every n-th requested sample")
    trace_tolerance: float = Field(default=1e-6, gt=0, description="Allowed |Tr rho - 1|")

    def relaxed(self, factor: float = 4.0) -> "IntegratorConfig":
        """Copy with a step bound coarsened by ``factor``."""
        if self.step_us is not None:
            return self.model_copy(update={"step_us": self.step_us * factor})
        return self.model_copy(update={"resolution": max(4.0, self.resolution / factor)})


class ExperimentConfig(BaseModel):
    """Everything needed to re-run one registry experiment."""

    model_config = {"frozen": True}

    experiment: str = Field(description="Registry name")
    system: SystemParams = Field(default_factory=SystemParams)
    pulse: PulseOptions = Field(default_factory=PulseOptions)
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    sweeps: dict[str, tuple[float, ...]] = Field(
        default_factory=dict, description="Sweep axis -> sorted values"
    )
    knobs: dict[str, float] = Field(
        default_factory=dict, description="Experiment-specific scalar settings"
    )
    output_dir: str = Field(default="results")
    fast: bool = Field(default=False, description="Coarse grids and relaxed step")
    workers: int | None = Field(default=None, ge=1)
    sources: dict[str, str] = Field(
        default_factory=dict, description="Origin of each effective setting"
    )

    @field_validator("sweeps")
    @classmethod
    def _sorted_finite(cls, sweeps: dict[str, tuple[float, ...]]) -> dict[str, tuple[float, ...]]:
        for axis, values in sweeps.items():
            if not values:
                raise ValueError(f"sweep {axis} is empty")
            if not all(math.isfinite(v) for v in values):
                raise ValueError(f"sweep {axis} has non-finite values")
            if list(values) != sorted(values):
                raise ValueError(f"sweep {axis} must be sorted ascending")
        return sweeps

    def knob(self, name: str, default: float) -> float:
        return self.knobs.get(name, default)


class ResultTable(BaseModel):
    """Rectangular numeric table with metadata."""

    headers: tuple[str, ...]
    rows: list[tuple[float, ...]] = Field(default_factory=list)
    metadata: dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _rectangular(self) -> "ResultTable":
        if len(set(self.headers)) != len(self.headers):
            raise ValueError("headers must be unique")
        width = len(self.headers)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} values, expected {width}")
        return self

    def column(self, name: str) -> list[float]:
        index = self.headers.index(name)
        return [row[index] for row in self.rows]

"""Schemas - Pydantic value types shared by the physics and runner layers."""

from nemsim.schemas.experiment import (
    ExperimentConfig,
    Frame,
    IntegratorConfig,
    ResultTable,
)
from nemsim.schemas.pulses import (
    Channel,
    DriveSegment,
    Envelope,
    EnvelopeKind,
    GateKind,
    GateSpec,
    PulseOptions,
    PulseSchedule,
    StepSegment,
)
from nemsim.schemas.spin import (
    Axis,
    ExchangeForm,
    ExchangeTerm,
    OneBodyTerm,
    SpinHamiltonianSpec,
    TwoBodyTerm,
)
from nemsim.schemas.system import (
    EffectiveParams,
    NonlinearityKind,
    NonlinearityModel,
    RabiParams,
    SystemParams,
    ThermalBathSpec,
)

__all__ = [
    # System
    "SystemParams",
    "NonlinearityKind",
    "NonlinearityModel",
    "ThermalBathSpec",
    "RabiParams",
    "EffectiveParams",
    # Pulses
    "Envelope",
    "EnvelopeKind",
    "Channel",
    "StepSegment",
    "DriveSegment",
    "PulseSchedule",
    "GateKind",
    "GateSpec",
    "PulseOptions",
    # Spin models
    "Axis",
    "OneBodyTerm",
    "TwoBodyTerm",
    "ExchangeForm",
    "ExchangeTerm",
    "SpinHamiltonianSpec",
    # Experiments
    "Frame",
    "IntegratorConfig",
    "ExperimentConfig",
    "ResultTable",
]

"""Target spin-1/2 Hamiltonians for digital simulation.

Coefficients are ordinary frequencies in MHz and multiply spin operators
s = sigma / 2, so a two-body term c s_a s_b equals (c / 4) sigma_a sigma_b.
"""

import math
from enum import Enum

from pydantic import BaseModel, Field, field_validator


class Axis(str, Enum):
    """Spin axes."""

    X = "x"
    Y = "y"
    Z = "z"


class OneBodyTerm(BaseModel):
    """coefficient * s_axis on one qubit."""

    model_config = {"frozen": True}

    qubit: int = Field(ge=1, le=2)
    axis: Axis
    coefficient_mhz: float

    @field_validator("coefficient_mhz")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("coefficient must be finite")
        return v


class TwoBodyTerm(BaseModel):
    """coefficient * s_first(1) s_second(2)."""

    model_config = {"frozen": True}

    first: Axis
    second: Axis
    coefficient_mhz: float

    @field_validator("coefficient_mhz")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("coefficient must be finite")
        return v


class ExchangeForm(str, Enum):
    """Two-qubit exchange combinations with native realizations."""

    XY = "xy"  # sx sx + sy sy
    XY_MINUS = "xy_minus"  # sx sx - sy sy
    XZ = "xz"  # sx sx + sz sz
    YZ = "yz"  # sy sy + sz sz


class ExchangeTerm(BaseModel):
    """coefficient * (combination of s s products named by form)."""

    model_config = {"frozen": True}

    form: ExchangeForm
    coefficient_mhz: float


class SpinHamiltonianSpec(BaseModel):
    """Sum of one-body, two-body and exchange terms on two spins."""

    model_config = {"frozen": True}

    one_body: tuple[OneBodyTerm, ...] = ()
    two_body: tuple[TwoBodyTerm, ...] = ()
    exchange: tuple[ExchangeTerm, ...] = ()
    label: str = Field(default="custom", description="Preset name for reports")

    @property
    def is_empty(self) -> bool:
        return not (self.one_body or self.two_body or self.exchange)

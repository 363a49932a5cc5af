"""Physical parameter schemas for the two-resonator + transmon building block.

Frequencies are ordinary frequencies in MHz (f = omega / 2pi); the physics
layer applies the 2pi factor when assembling Hamiltonians, so energies are in
rad/us and times in us. Dissipation rates are given in Hz and enter the master
equation as plain inverse times (T1 = 1 / gamma), converted to 1/us.
"""

import logging
import math
from enum import Enum

from pydantic import BaseModel, Field, model_validator

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
PERTURBATIVE_LIMIT = 0.1


def hz_to_per_us(rate_hz: float) -> float:
    """Convert a rate in Hz (1/s) to 1/us."""
    return rate_hz * 1e-6


class NonlinearityKind(str, Enum):
    """Nanoresonator nonlinearity variants."""

    KERR = "kerr"
    QUARTIC = "quartic"


class NonlinearityModel(BaseModel):
    """Diagonal Kerr beta b+b+bb or quartic U (b + b+)^4."""

    model_config = {"frozen": True}

    kind: NonlinearityKind = Field(default=NonlinearityKind.KERR, description="Variant")
    strength_mhz: float = Field(
        default=3.0, ge=0, description="beta (Kerr) or U (quartic) in MHz"
    )

    @classmethod
    def kerr(cls, beta_mhz: float) -> "NonlinearityModel":
        return cls(kind=NonlinearityKind.KERR, strength_mhz=beta_mhz)

    @classmethod
    def quartic(cls, u_mhz: float) -> "NonlinearityModel":
        return cls(kind=NonlinearityKind.QUARTIC, strength_mhz=u_mhz)


class ThermalBathSpec(BaseModel):
    """Residual thermal reservoir acting on a nanoresonator."""

    model_config = {"frozen": True}

    chi_hz: float = Field(default=50.0, ge=0, description="Bath coupling rate in Hz")
    nbar: float | None = Field(
        default=0.1, ge=0, description="Mean thermal occupation (overrides temperature)"
    )
    temperature_mhz: float | None = Field(
        default=None, gt=0, description="Bath temperature in frequency units (MHz)"
    )

    @model_validator(mode="after")
    def _needs_occupation(self) -> "ThermalBathSpec":
        if self.nbar is None and self.temperature_mhz is None:
            raise ValueError("thermal bath needs nbar or temperature_mhz")
        return self

    def occupation(self, omega_mhz: float | None = None) -> float:
        """Mean occupation, either given or 1 / (exp(omega / T) - 1)."""
        if self.nbar is not None:
            return self.nbar
        if omega_mhz is None:
            raise ValueError("mode frequency required to derive nbar from temperature")
        return 1.0 / math.expm1(omega_mhz / self.temperature_mhz)


class SystemParams(BaseModel):
    """All physical constants of the NR1 - transmon - NR2 system."""

    model_config = {"frozen": True}

    omega1_mhz: float = Field(default=85.0, gt=0, description="NR1 frequency")
    omega2_mhz: float = Field(default=75.0, gt=0, description="NR2 frequency")
    transmon_mhz: float = Field(default=10000.0, gt=0, description="Idle transmon frequency")
    nonlinearity1: NonlinearityModel = Field(default_factory=NonlinearityModel)
    nonlinearity2: NonlinearityModel = Field(default_factory=NonlinearityModel)
    g1_mhz: float = Field(default=6.0, ge=0, description="NR1-transmon coupling")
    g2_mhz: float = Field(default=6.0, ge=0, description="NR2-transmon coupling")
    gamma1_hz: float = Field(default=50.0, ge=0, description="NR1 decay rate")
    gamma2_hz: float = Field(default=50.0, ge=0, description="NR2 decay rate")
    gamma1_dephasing_hz: float = Field(default=0.0, ge=0, description="NR1 dephasing rate")
    gamma2_dephasing_hz: float = Field(default=0.0, ge=0, description="NR2 dephasing rate")
    gamma_tr_hz: float = Field(default=1e5, ge=0, description="Transmon decay rate")
    gamma_tr_dephasing_hz: float = Field(
        default=1e5, ge=0, description="Transmon dephasing rate"
    )
    thermal: ThermalBathSpec | None = Field(
        default=None, description="Residual thermal bath on both NRs"
    )
    n_max: int = Field(default=4, ge=1, description="Fock cutoff per NR")

    @model_validator(mode="after")
    def _check_regime(self) -> "SystemParams":
        for g, omega in ((self.g1_mhz, self.omega1_mhz), (self.g2_mhz, self.omega2_mhz)):
            detuning = self.transmon_mhz - omega
            if detuning == 0:
                raise ValueError("transmon frequency resonant with a nanoresonator")
            if abs(g / detuning) > PERTURBATIVE_LIMIT:
                logger.warning(
                    "g/Delta = %.3f exceeds %.1f; effective model is not perturbative",
                    g / detuning,
                    PERTURBATIVE_LIMIT,
                )
        return self

    @property
    def detunings_mhz(self) -> tuple[float, float]:
        return (
            self.transmon_mhz - self.omega1_mhz,
            self.transmon_mhz - self.omega2_mhz,
        )

    @property
    def beta1_mhz(self) -> float:
        return _kerr_strength(self.nonlinearity1)

    @property
    def beta2_mhz(self) -> float:
        return _kerr_strength(self.nonlinearity2)

    def omega_mhz(self, qubit: int) -> float:
        return self.omega1_mhz if qubit == 1 else self.omega2_mhz

    def g_mhz(self, qubit: int) -> float:
        return self.g1_mhz if qubit == 1 else self.g2_mhz

    def nonlinearity(self, qubit: int) -> NonlinearityModel:
        return self.nonlinearity1 if qubit == 1 else self.nonlinearity2


def _kerr_strength(model: NonlinearityModel) -> float:
    if model.kind is not NonlinearityKind.KERR:
        raise ValueError("single-qubit shifts need the diagonal Kerr nonlinearity")
    return model.strength_mhz


class RabiParams(BaseModel):
    """Single NR coupled to a low-frequency superconducting element."""

    model_config = {"frozen": True}

    omega_nr_mhz: float = Field(default=100.0, gt=0, description="NR frequency")
    omega_sc_mhz: float = Field(default=500.0, gt=0, description="SC element frequency")
    g_mhz: float = Field(default=0.0, ge=0, description="NR-SC coupling")

    @model_validator(mode="after")
    def _ordered(self) -> "RabiParams":
        if self.omega_sc_mhz <= self.omega_nr_mhz:
            raise ValueError("omega_sc_mhz must exceed omega_nr_mhz")
        return self


class EffectiveParams(BaseModel):
    """Second-order effective XY coupling and single-qubit shifts (MHz)."""

    model_config = {"frozen": True}

    gamma_mhz: float = Field(description="XY coupling constant")
    lambda1_mhz: float = Field(description="NR1 frequency renormalization")
    lambda2_mhz: float = Field(description="NR2 frequency renormalization")

"""Control-schedule schemas: envelopes, segments, schedules and gate records."""

import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.special import erf

from nemsim.schemas.system import TWO_PI


class EnvelopeKind(str, Enum):
    """Drive envelope shapes."""

    SQUARE = "square"
    GAUSSIAN = "gaussian"


class Envelope(BaseModel):
    """Unit-peak-area envelope A(t) of a transverse drive.

    Square envelopes are 1 on [start, start + duration). Gaussian envelopes are
    exp(-(t - center)^2 / 2 sigma^2) clipped at +-truncation sigma and rescaled
    so that the clipped integral equals sqrt(2 pi) sigma.
    """

    model_config = {"frozen": True}

    kind: EnvelopeKind
    start_us: float = Field(ge=0, description="Start of the envelope support")
    duration_us: float = Field(gt=0, description="Length of the envelope support")
    truncation: float = Field(default=3.0, ge=2.5, le=5.0, description="Gaussian clip in sigma")

    @classmethod
    def square(cls, start_us: float, duration_us: float) -> "Envelope":
        return cls(kind=EnvelopeKind.SQUARE, start_us=start_us, duration_us=duration_us)

    @classmethod
    def gaussian(cls, center_us: float, sigma_us: float, truncation: float = 3.0) -> "Envelope":
        if sigma_us <= 0:
            raise ValueError("gaussian width must be positive")
        half = truncation * sigma_us
        return cls(
            kind=EnvelopeKind.GAUSSIAN,
            start_us=center_us - half,
            duration_us=2.0 * half,
            truncation=truncation,
        )

    @property
    def end_us(self) -> float:
        return self.start_us + self.duration_us

    @property
    def center_us(self) -> float:
        return self.start_us + 0.5 * self.duration_us

    @property
    def sigma_us(self) -> float:
        return self.duration_us / (2.0 * self.truncation)

    @property
    def _gaussian_norm(self) -> float:
        return 1.0 / erf(self.truncation / math.sqrt(2.0))

    def value(self, t):
        """Envelope value at time(s) t."""
        t = np.asarray(t, dtype=float)
        inside = (t >= self.start_us) & (t <= self.end_us)
        if self.kind is EnvelopeKind.SQUARE:
            return np.where(inside, 1.0, 0.0)
        x = (t - self.center_us) / self.sigma_us
        return np.where(inside, self._gaussian_norm * np.exp(-0.5 * x * x), 0.0)

    def area(self) -> float:
        """Integral of A(t) over its support."""
        if self.kind is EnvelopeKind.SQUARE:
            return self.duration_us
        return math.sqrt(TWO_PI) * self.sigma_us


class Channel(str, Enum):
    """Piecewise step channels of a schedule."""

    SHIFT_1 = "shift1"
    SHIFT_2 = "shift2"
    TRANSMON = "transmon"
    COMPENSATION_1 = "comp1"
    COMPENSATION_2 = "comp2"


class StepSegment(BaseModel):
    """Frequency step on a channel, with optional linear rise and fall."""

    model_config = {"frozen": True}

    channel: Channel
    start_us: float = Field(ge=0)
    duration_us: float = Field(gt=0)
    amplitude_mhz: float
    ramp_us: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def _ramp_fits(self) -> "StepSegment":
        if 2.0 * self.ramp_us > self.duration_us:
            raise ValueError("ramps longer than half the segment")
        return self

    @property
    def end_us(self) -> float:
        return self.start_us + self.duration_us

    def value(self, t: float) -> float:
        if self.ramp_us == 0.0:
            return self.amplitude_mhz
        rise = (t - self.start_us) / self.ramp_us
        fall = (self.end_us - t) / self.ramp_us
        return self.amplitude_mhz * min(1.0, max(0.0, min(rise, fall)))

    def edges(self) -> list[float]:
        edges = [self.start_us, self.end_us]
        if self.ramp_us > 0:
            edges += [self.start_us + self.ramp_us, self.end_us - self.ramp_us]
        return edges


class DriveSegment(BaseModel):
    """Transverse drive A(t) V0 cos(2 pi f_c t + theta) on (b + b+) of one NR."""

    model_config = {"frozen": True}

    qubit: int = Field(ge=1, le=2)
    amplitude_mhz: float = Field(gt=0, description="V0 / 2pi")
    carrier_mhz: float = Field(gt=0)
    phase: float = 0.0
    envelope: Envelope

    @property
    def start_us(self) -> float:
        return self.envelope.start_us

    @property
    def end_us(self) -> float:
        return self.envelope.end_us

    def rotation_angle(self) -> float:
        """Rotation angle produced under the rotating-wave approximation."""
        return TWO_PI * self.amplitude_mhz * self.envelope.area()


class PulseSchedule(BaseModel):
    """Complete control record of one simulation."""

    model_config = {"frozen": True}

    steps: tuple[StepSegment, ...] = ()
    drives: tuple[DriveSegment, ...] = ()
    compensation_mhz: tuple[float, float] = (0.0, 0.0)
    duration_us: float = Field(default=0.0, ge=0)
    markers: tuple[float, ...] = Field(default=(), description="Labelled time marks")

    @model_validator(mode="after")
    def _consistent(self) -> "PulseSchedule":
        by_channel: dict[str, list[tuple[float, float]]] = {}
        for seg in self.steps:
            by_channel.setdefault(seg.channel.value, []).append((seg.start_us, seg.end_us))
        for drive in self.drives:
            by_channel.setdefault(f"drive{drive.qubit}", []).append(
                (drive.start_us, drive.end_us)
            )
        tol = 1e-12
        latest = 0.0
        for name, spans in by_channel.items():
            spans.sort()
            for (a0, a1), (b0, _) in zip(spans, spans[1:]):
                if b0 < a1 - tol:
                    raise ValueError(f"overlapping segments on channel {name} at {b0:.6f} us")
            latest = max(latest, spans[-1][1])
        if self.duration_us < latest - tol:
            raise ValueError("schedule duration shorter than its last segment")
        return self

    @property
    def is_empty(self) -> bool:
        return not self.steps and not self.drives

    def breakpoints(self) -> list[float]:
        """Times where a control switches on, off, or changes slope."""
        edges: set[float] = set()
        for seg in self.steps:
            edges.update(seg.edges())
        for drive in self.drives:
            edges.update((drive.start_us, drive.end_us))
        return sorted(edges)

    def to_text(self) -> str:
        """Line-oriented dump: channel kind start duration amplitude carrier phase."""
        lines = [
            f"# duration {self.duration_us!r}",
            f"# compensation {self.compensation_mhz[0]!r} {self.compensation_mhz[1]!r}",
        ]
        lines += [f"# marker {m!r}" for m in self.markers]
        for seg in self.steps:
            kind = f"ramp({seg.ramp_us!r})" if seg.ramp_us else "step"
            lines.append(
                f"{seg.channel.value} {kind} {seg.start_us!r} {seg.duration_us!r} "
                f"{seg.amplitude_mhz!r} 0.0 0.0"
            )
        for drive in self.drives:
            env = drive.envelope
            kind = (
                "square"
                if env.kind is EnvelopeKind.SQUARE
                else f"gaussian({env.truncation!r})"
            )
            lines.append(
                f"drive{drive.qubit} {kind} {env.start_us!r} {env.duration_us!r} "
                f"{drive.amplitude_mhz!r} {drive.carrier_mhz!r} {drive.phase!r}"
            )
        return "\n".join(lines) + "\n"


def schedule_from_text(text: str) -> PulseSchedule:
    """Parse the output of ``PulseSchedule.to_text``."""
    duration = 0.0
    compensation = (0.0, 0.0)
    markers: list[float] = []
    steps: list[StepSegment] = []
    drives: list[DriveSegment] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            words = line[1:].split()
            if words[0] == "duration":
                duration = float(words[1])
            elif words[0] == "compensation":
                compensation = (float(words[1]), float(words[2]))
            elif words[0] == "marker":
                markers.append(float(words[1]))
            continue
        fields = line.split()
        if len(fields) != 7:
            raise ValueError(f"line {number}: expected 7 fields, got {len(fields)}")
        channel, kind = fields[0], fields[1]
        start, length, amplitude, carrier, phase = map(float, fields[2:])
        if channel.startswith("drive"):
            if kind == "square":
                env = Envelope.square(start, length)
            else:
                truncation = float(kind[kind.index("(") + 1 : -1])
                env = Envelope(
                    kind=EnvelopeKind.GAUSSIAN,
                    start_us=start,
                    duration_us=length,
                    truncation=truncation,
                )
            drives.append(
                DriveSegment(
                    qubit=int(channel[-1]),
                    amplitude_mhz=amplitude,
                    carrier_mhz=carrier,
                    phase=phase,
                    envelope=env,
                )
            )
        else:
            ramp = float(kind[kind.index("(") + 1 : -1]) if kind.startswith("ramp") else 0.0
            steps.append(
                StepSegment(
                    channel=Channel(channel),
                    start_us=start,
                    duration_us=length,
                    amplitude_mhz=amplitude,
                    ramp_us=ramp,
                )
            )
    return PulseSchedule(
        steps=tuple(steps),
        drives=tuple(drives),
        compensation_mhz=compensation,
        duration_us=duration,
        markers=tuple(markers),
    )


class GateKind(str, Enum):
    """Native gate kinds."""

    RX = "rx"
    RY = "ry"
    RZ = "rz"
    SQRT_ISWAP = "sqrt_iswap"
    XY = "xy"


ROTATIONS = (GateKind.RX, GateKind.RY, GateKind.RZ)


class GateSpec(BaseModel):
    """One native gate: a single-qubit rotation or an XY evolution window."""

    model_config = {"frozen": True}

    kind: GateKind
    qubit: int | None = Field(default=None, ge=1, le=2)
    angle: float = 0.0
    fraction: float = Field(
        default=1.0, gt=0, description="XY window length in units of pi / |Gamma|"
    )

    @model_validator(mode="after")
    def _operands(self) -> "GateSpec":
        if not math.isfinite(self.angle) or not math.isfinite(self.fraction):
            raise ValueError("gate parameters must be finite")
        if self.kind in ROTATIONS and self.qubit is None:
            raise ValueError(f"{self.kind.value} needs a qubit")
        if self.kind not in ROTATIONS and self.qubit is not None:
            raise ValueError(f"{self.kind.value} acts on both qubits")
        return self

    @classmethod
    def rx(cls, qubit: int, angle: float) -> "GateSpec":
        return cls(kind=GateKind.RX, qubit=qubit, angle=angle)

    @classmethod
    def ry(cls, qubit: int, angle: float) -> "GateSpec":
        return cls(kind=GateKind.RY, qubit=qubit, angle=angle)

    @classmethod
    def rz(cls, qubit: int, angle: float) -> "GateSpec":
        return cls(kind=GateKind.RZ, qubit=qubit, angle=angle)

    @classmethod
    def sqrt_iswap(cls) -> "GateSpec":
        return cls(kind=GateKind.SQRT_ISWAP)

    @classmethod
    def xy(cls, fraction: float) -> "GateSpec":
        return cls(kind=GateKind.XY, fraction=fraction)

    @property
    def is_rotation(self) -> bool:
        return self.kind in ROTATIONS

    def to_text(self) -> str:
        if self.is_rotation:
            return f"{self.kind.value} {self.qubit} {self.angle!r}"
        if self.kind is GateKind.XY:
            return f"xy 12 {self.fraction!r}"
        return "sqrt_iswap 12 1.0"


class PulseOptions(BaseModel):
    """How gates are turned into controls."""

    model_config = {"frozen": True}

    drive_amplitude_mhz: float = Field(default=0.3, gt=0, description="Drive peak V0 / 2pi")
    envelope: EnvelopeKind = Field(default=EnvelopeKind.GAUSSIAN)
    truncation: float = Field(default=3.0, ge=2.5, le=5.0)
    rz_shift_mhz: float = Field(default=1.0, gt=0, description="|delta omega| / 2pi for z rotations")
    transmon_gate_mhz: float = Field(
        default=2500.0, gt=0, description="Transmon frequency during XY windows"
    )
    ramp_us: float = Field(default=0.0, ge=0, description="Linear ramp of the transmon step")
    align_xy: bool = Field(default=True, description="Pad XY windows to NR beat-phase zeros")

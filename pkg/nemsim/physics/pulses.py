"""Gate protocols rendered into control schedules, and schedules into H(t).

Frame and phase conventions (qubit |0> = Fock 0, frame rotating at the bare
NR frequencies):

* a drive A(t) V0 cos(w_i t + theta) on (b + b+) acts as
  (A V0 / 2)(X cos(theta) - Y sin(theta)), so Rx uses theta = 0 and Ry uses
  theta = -pi/2; a negative angle adds pi to the phase;
* a frequency step d_omega for a time dt rotates Rz(-d_omega dt);
* an XY window with both NRs at w_r for a time T evolves under
  (Gamma / 8)(XX + YY) and leaves Rz(-xi_i T) on qubit i (xi_i = w_r - w_i),
  removed by the trailing rephasing z window.
"""

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from nemsim.errors import ScheduleError
from nemsim.physics.model import (
    SystemOperators,
    build_full_hamiltonian,
    compensation_shifts,
    effective_params,
    mode_hamiltonian,
)
from nemsim.physics.operators import NR1, NR2, SubsystemLayout, embed
from nemsim.schemas.experiment import Frame
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
from nemsim.schemas.system import TWO_PI, SystemParams

logger = logging.getLogger(__name__)

RX_PHASE = 0.0
RY_PHASE = -0.5 * math.pi
SEPARATION_FACTOR = 10.0
_ANGLE_TOL = 1e-12

SHIFT_CHANNELS = {1: Channel.SHIFT_1, 2: Channel.SHIFT_2}
COMPENSATION_CHANNELS = {1: Channel.COMPENSATION_1, 2: Channel.COMPENSATION_2}


def drive_phase(kind: GateKind, angle: float) -> float:
    phase = RX_PHASE if kind is GateKind.RX else RY_PHASE
    return phase + math.pi if angle < 0 else phase


def drive_segment(
    qubit: int,
    angle: float,
    phase: float,
    amplitude_mhz: float,
    carrier_mhz: float,
    envelope: EnvelopeKind = EnvelopeKind.GAUSSIAN,
    start_us: float = 0.0,
    truncation: float = 3.0,
) -> DriveSegment:
    """Transverse drive rotating by |angle| about the axis set by ``phase``."""
    if amplitude_mhz <= 0:
        raise ScheduleError(f"drive amplitude must be positive, got {amplitude_mhz}")
    v0 = TWO_PI * amplitude_mhz
    if envelope is EnvelopeKind.SQUARE:
        env = Envelope.square(start_us, abs(angle) / v0)
    else:
        sigma = abs(angle) / (math.sqrt(TWO_PI) * v0)
        env = Envelope.gaussian(start_us + truncation * sigma, sigma, truncation)
    return DriveSegment(
        qubit=qubit,
        amplitude_mhz=amplitude_mhz,
        carrier_mhz=carrier_mhz,
        phase=phase,
        envelope=env,
    )


def schedule_rxy(
    qubit: int,
    angle: float,
    phase: float,
    amplitude_mhz: float,
    carrier_mhz: float,
    envelope: EnvelopeKind = EnvelopeKind.GAUSSIAN,
    truncation: float = 3.0,
) -> PulseSchedule:
    """Single transverse pulse; ``phase`` 0 gives Rx, -pi/2 gives Ry."""
    if amplitude_mhz <= 0:
        raise ScheduleError(f"drive amplitude must be positive, got {amplitude_mhz}")
    if abs(angle) < _ANGLE_TOL:
        return PulseSchedule()
    if angle < 0:
        phase += math.pi
    seg = drive_segment(qubit, angle, phase, amplitude_mhz, carrier_mhz, envelope, 0.0, truncation)
    return PulseSchedule(drives=(seg,), duration_us=seg.end_us)


def schedule_rz(qubit: int, angle: float, shift_mhz: float) -> PulseSchedule:
    """Frequency step of |angle| / |d_omega| with sign giving Rz(angle)."""
    if shift_mhz == 0:
        raise ScheduleError("z rotation needs a non-zero frequency shift")
    if abs(angle) < _ANGLE_TOL:
        return PulseSchedule()
    amplitude = -math.copysign(abs(shift_mhz), angle)
    duration = abs(angle) / (TWO_PI * abs(shift_mhz))
    seg = StepSegment(
        channel=SHIFT_CHANNELS[qubit], start_us=0.0, duration_us=duration, amplitude_mhz=amplitude
    )
    return PulseSchedule(steps=(seg,), duration_us=duration)


class WindowKind(str, Enum):
    """Kinds of schedule windows."""

    DRIVE = "drive"
    Z = "z"
    XY = "xy"


@dataclass
class GateWindow:
    """Gates rendered together in one time window."""

    kind: WindowKind
    drives: dict[int, tuple[GateKind, float]] = field(default_factory=dict)
    z_angles: dict[int, float] = field(default_factory=dict)
    fraction: float = 0.0
    rephasing: bool = False

    @property
    def is_two_qubit(self) -> bool:
        return self.kind is WindowKind.XY


def group_windows(gates: Iterable[GateSpec]) -> list[GateWindow]:
    """Pack a gate list into windows; a gate only ever joins the last window."""
    windows: list[GateWindow] = []
    for gate in gates:
        last = windows[-1] if windows else None
        if gate.kind in (GateKind.XY, GateKind.SQRT_ISWAP):
            fraction = gate.fraction if gate.kind is GateKind.XY else 1.0
            windows.append(GateWindow(WindowKind.XY, fraction=fraction))
            windows.append(GateWindow(WindowKind.Z, rephasing=True))
            continue
        if abs(gate.angle) < _ANGLE_TOL:
            continue
        if gate.kind is GateKind.RZ:
            if last is not None and last.kind is WindowKind.Z:
                last.z_angles[gate.qubit] = last.z_angles.get(gate.qubit, 0.0) + gate.angle
            else:
                windows.append(GateWindow(WindowKind.Z, z_angles={gate.qubit: gate.angle}))
            continue
        if last is not None and last.kind is WindowKind.DRIVE and gate.qubit not in last.drives:
            last.drives[gate.qubit] = (gate.kind, gate.angle)
        else:
            windows.append(GateWindow(WindowKind.DRIVE, drives={gate.qubit: (gate.kind, gate.angle)}))
    return windows


def _directed_angle(qubit: int, angle: float) -> float:
    """Equivalent angle (mod 2 pi) reachable by shifting qubit 1 up or qubit 2 down."""
    wrapped = math.fmod(angle, TWO_PI)
    if qubit == 1:
        return wrapped - TWO_PI if wrapped > 0 else wrapped
    return wrapped + TWO_PI if wrapped < 0 else wrapped


@dataclass(frozen=True)
class XYTiming:
    """Timing and frequencies of one XY window."""

    common_mhz: float
    transmon_mhz: float
    gamma_mhz: float
    full_time_us: float
    detunings_mhz: tuple[float, float]
    compensation_delta_mhz: tuple[float, float]


def xy_timing(params: SystemParams, options: PulseOptions) -> XYTiming:
    """Common frequency, Gamma and pi/|Gamma| at the gate-time transmon frequency."""
    common = 0.5 * (params.omega1_mhz + params.omega2_mhz)
    transmon = options.transmon_gate_mhz
    highest = max(params.omega1_mhz, params.omega2_mhz)
    if transmon - highest < SEPARATION_FACTOR * max(params.g1_mhz, params.g2_mhz):
        raise ScheduleError(
            f"transmon at {transmon:g} MHz too close to the NRs for g={max(params.g1_mhz, params.g2_mhz):g} MHz"
        )
    gamma = effective_params(params, common, common, transmon).gamma_mhz
    if gamma == 0:
        raise ScheduleError("XY coupling vanishes; check g1, g2")
    idle = compensation_shifts(params)
    shifted = compensation_shifts(params, transmon, common, common)
    return XYTiming(
        common_mhz=common,
        transmon_mhz=transmon,
        gamma_mhz=gamma,
        full_time_us=0.5 / abs(gamma),
        detunings_mhz=(common - params.omega1_mhz, common - params.omega2_mhz),
        compensation_delta_mhz=(shifted[0] - idle[0], shifted[1] - idle[1]),
    )


@dataclass
class WindowRecord:
    kind: WindowKind
    start_us: float
    end_us: float


class ScheduleBuilder:
    """Renders gate windows one after another on a time cursor."""

    def __init__(self, params: SystemParams, options: PulseOptions | None = None):
        self.params = params
        self.options = options or PulseOptions()
        self.cursor = 0.0
        self.steps: list[StepSegment] = []
        self.drives: list[DriveSegment] = []
        self.markers: list[float] = []
        self.windows: list[WindowRecord] = []
        self._timing: XYTiming | None = None

    @property
    def timing(self) -> XYTiming:
        if self._timing is None:
            self._timing = xy_timing(self.params, self.options)
        return self._timing

    def add_gates(self, gates: Sequence[GateSpec]) -> "ScheduleBuilder":
        windows = group_windows(gates)
        pending_rephase: tuple[float, float] | None = None
        for window in windows:
            if window.kind is WindowKind.XY:
                pending_rephase = self._render_xy(window.fraction)
            elif window.kind is WindowKind.Z:
                angles = dict(window.z_angles)
                if window.rephasing and pending_rephase is not None:
                    for qubit, extra in zip((1, 2), pending_rephase):
                        angles[qubit] = angles.get(qubit, 0.0) + extra
                    pending_rephase = None
                self._render_z(angles)
            else:
                self._render_drive(window.drives)
        return self

    def mark(self) -> "ScheduleBuilder":
        self.markers.append(self.cursor)
        return self

    def idle(self, duration_us: float) -> "ScheduleBuilder":
        if duration_us < 0:
            raise ScheduleError("idle time must be non-negative")
        self.cursor += duration_us
        return self

    def build(self) -> PulseSchedule:
        return PulseSchedule(
            steps=tuple(self.steps),
            drives=tuple(self.drives),
            compensation_mhz=compensation_shifts(self.params),
            duration_us=self.cursor,
            markers=tuple(self.markers),
        )

    def _close(self, kind: WindowKind, start: float, end: float) -> None:
        self.windows.append(WindowRecord(kind, start, end))
        self.cursor = end

    def _render_drive(self, drives: dict[int, tuple[GateKind, float]]) -> None:
        opts = self.options
        start = self.cursor
        end = start
        for qubit, (kind, angle) in sorted(drives.items()):
            seg = drive_segment(
                qubit,
                angle,
                drive_phase(kind, angle),
                opts.drive_amplitude_mhz,
                self.params.omega_mhz(qubit),
                opts.envelope,
                start,
                opts.truncation,
            )
            self.drives.append(seg)
            end = max(end, seg.end_us)
        self._close(WindowKind.DRIVE, start, end)

    def _render_z(self, angles: dict[int, float]) -> None:
        start = self.cursor
        end = start
        shift = self.options.rz_shift_mhz
        for qubit, angle in sorted(angles.items()):
            directed = _directed_angle(qubit, angle)
            if abs(directed) < _ANGLE_TOL:
                continue
            duration = abs(directed) / (TWO_PI * shift)
            self.steps.append(
                StepSegment(
                    channel=SHIFT_CHANNELS[qubit],
                    start_us=start,
                    duration_us=duration,
                    amplitude_mhz=-math.copysign(shift, directed),
                )
            )
            end = max(end, start + duration)
        self._close(WindowKind.Z, start, end)

    def _render_xy(self, fraction: float) -> tuple[float, float]:
        timing = self.timing
        ramp = self.options.ramp_us
        t0 = self.cursor + ramp
        if self.options.align_xy:
            beat = abs(self.params.omega1_mhz - self.params.omega2_mhz)
            if beat > 0:
                t0 = math.ceil(t0 * beat - 1e-9) / beat
        length = fraction * timing.full_time_us
        for qubit, xi in zip((1, 2), timing.detunings_mhz):
            if xi != 0:
                self.steps.append(
                    StepSegment(
                        channel=SHIFT_CHANNELS[qubit], start_us=t0, duration_us=length, amplitude_mhz=xi
                    )
                )
        for qubit, delta in zip((1, 2), timing.compensation_delta_mhz):
            if delta != 0:
                self.steps.append(
                    StepSegment(
                        channel=COMPENSATION_CHANNELS[qubit],
                        start_us=t0,
                        duration_us=length,
                        amplitude_mhz=delta,
                    )
                )
        step = timing.transmon_mhz - self.params.transmon_mhz
        if step != 0:
            self.steps.append(
                StepSegment(
                    channel=Channel.TRANSMON,
                    start_us=t0 - ramp,
                    duration_us=length + 2 * ramp,
                    amplitude_mhz=step,
                    ramp_us=ramp,
                )
            )
        self._close(WindowKind.XY, self.cursor, t0 + length + ramp)
        return tuple(TWO_PI * xi * length for xi in timing.detunings_mhz)


def schedule_gates(
    gates: Sequence[GateSpec], params: SystemParams, options: PulseOptions | None = None
) -> PulseSchedule:
    """Render a gate list into one schedule."""
    return ScheduleBuilder(params, options).add_gates(gates).build()


def schedule_sqrt_iswap(params: SystemParams, options: PulseOptions | None = None) -> PulseSchedule:
    """Tune both NRs to the midpoint, step the transmon for pi/|Gamma|, rephase."""
    return schedule_gates([GateSpec.sqrt_iswap()], params, options)


class ScheduledHamiltonian:
    """H(t) of a schedule, split into the bare diagonal frame and the remainder.

    Step segments and drives are selected by the ``anchor`` time (midpoint of
    the current integration piece) so values at step edges are never mixed.
    """

    def __init__(self, schedule: PulseSchedule, params: SystemParams, layout: SubsystemLayout):
        self.schedule = schedule
        self.params = params
        self.layout = layout
        ops = SystemOperators.build(layout)
        bare = TWO_PI * 0.5 * params.transmon_mhz * np.real(np.diag(ops.sigma_z))
        for qubit, name in ((1, NR1), (2, NR2)):
            mode = mode_hamiltonian(
                params.nonlinearity(qubit), params.omega_mhz(qubit), layout.dim(name)
            )
            bare = bare + np.real(np.diag(embed(mode, name, layout)))
        self._energies = bare
        comp1, comp2 = schedule.compensation_mhz
        static = build_full_hamiltonian(params, layout) + TWO_PI * (
            comp1 * ops.n1 + comp2 * ops.n2
        )
        self._static = static
        self._static_perturbation = static - np.diag(bare)
        self._channel_diag = {
            Channel.SHIFT_1: np.real(np.diag(ops.n1)),
            Channel.SHIFT_2: np.real(np.diag(ops.n2)),
            Channel.COMPENSATION_1: np.real(np.diag(ops.n1)),
            Channel.COMPENSATION_2: np.real(np.diag(ops.n2)),
            Channel.TRANSMON: 0.5 * np.real(np.diag(ops.sigma_z)),
        }
        self._drive_ops = {1: ops.position(1), 2: ops.position(2)}
        self._anchor: float | None = None
        self._active: tuple[list[StepSegment], list[DriveSegment]] = ([], [])

    @property
    def frame_energies(self) -> np.ndarray:
        return self._energies

    def _select(self, anchor: float) -> tuple[list[StepSegment], list[DriveSegment]]:
        if anchor != self._anchor:
            steps = [s for s in self.schedule.steps if s.start_us <= anchor < s.end_us]
            drives = [d for d in self.schedule.drives if d.start_us <= anchor < d.end_us]
            self._anchor = anchor
            self._active = (steps, drives)
        return self._active

    def _controls(self, t: float, anchor: float) -> np.ndarray:
        steps, drives = self._select(anchor)
        dim = self._energies.size
        diag = np.zeros(dim)
        for seg in steps:
            diag += TWO_PI * seg.value(t) * self._channel_diag[seg.channel]
        out = np.diag(diag).astype(complex)
        for drive in drives:
            coeff = (
                TWO_PI
                * drive.amplitude_mhz
                * float(drive.envelope.value(t))
                * math.cos(TWO_PI * drive.carrier_mhz * t + drive.phase)
            )
            out += coeff * self._drive_ops[drive.qubit]
        return out

    def perturbation(self, t: float, anchor: float) -> np.ndarray:
        return self._static_perturbation + self._controls(t, anchor)

    def full(self, t: float, anchor: float) -> np.ndarray:
        return self._static + self._controls(t, anchor)

    def __call__(self, t: float) -> np.ndarray:
        return self.full(t, t)

    def breakpoints(self) -> list[float]:
        return self.schedule.breakpoints()

    def max_frequency(self, frame: Frame) -> float:
        shifts = [abs(s.amplitude_mhz) for s in self.schedule.steps]
        shifts += [abs(c) for c in self.schedule.compensation_mhz]
        max_shift = TWO_PI * sum(shifts) if frame is Frame.LAB else TWO_PI * max(shifts, default=0.0)
        carrier = TWO_PI * max((d.carrier_mhz for d in self.schedule.drives), default=0.0)
        if frame is Frame.LAB:
            w = np.linalg.eigvalsh(self._static)
            return float(w[-1] - w[0]) + max_shift + carrier
        pattern = np.abs(self._static_perturbation - np.diag(np.diag(self._static_perturbation)))
        for qubit in {d.qubit for d in self.schedule.drives}:
            pattern = pattern + np.abs(self._drive_ops[qubit])
        gaps = np.abs(self._energies[:, None] - self._energies[None, :])
        coupled = float(np.max(gaps[pattern > 0], initial=0.0))
        return max(coupled + carrier, max_shift, float(np.max(pattern, initial=0.0)))


def render_hamiltonian(
    schedule: PulseSchedule, params: SystemParams, layout: SubsystemLayout
) -> ScheduledHamiltonian:
    """Time-dependent operator provider for a schedule."""
    if layout.dims != (params.n_max + 1, 2, params.n_max + 1):
        raise ScheduleError(f"layout {layout.dims} does not match n_max={params.n_max}")
    return ScheduledHamiltonian(schedule, params, layout)

"""Tests for pulse schedules, windowing and rendered Hamiltonians."""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.integrate import quad

from nemsim.errors import ScheduleError
from nemsim.physics.analysis import gate_fidelity_experiment
from nemsim.physics.compiler import rotation_unitary, sequence_unitary
from nemsim.physics.operators import SubsystemLayout, is_hermitian
from nemsim.physics.pulses import (
    ScheduleBuilder,
    WindowKind,
    drive_phase,
    drive_segment,
    group_windows,
    render_hamiltonian,
    schedule_gates,
    schedule_rxy,
    schedule_rz,
    schedule_sqrt_iswap,
    xy_timing,
)
from nemsim.schemas.experiment import IntegratorConfig
from nemsim.schemas.pulses import (
    Channel,
    Envelope,
    EnvelopeKind,
    GateKind,
    GateSpec,
    PulseOptions,
    PulseSchedule,
    StepSegment,
    schedule_from_text,
)
from nemsim.schemas.system import SystemParams


class TestEnvelopes:
    """Envelope areas and the rotation-angle rule."""

    def test_gaussian_area_by_quadrature(self):
        """The clipped, rescaled Gaussian integrates to sqrt(2 pi) sigma."""
        env = Envelope.gaussian(1.0, 0.2)
        area, _ = quad(lambda t: float(env.value(t)), env.start_us, env.end_us)
        assert area == pytest.approx(math.sqrt(2.0 * math.pi) * 0.2, rel=1e-8)
        assert env.area() == pytest.approx(area, rel=1e-8)

    @pytest.mark.parametrize("envelope", [EnvelopeKind.GAUSSIAN, EnvelopeKind.SQUARE])
    def test_drive_area_gives_angle(self, envelope):
        """V0 times the envelope area equals the requested angle."""
        seg = drive_segment(1, math.pi / 2, 0.0, 0.3, 85.0, envelope)
        assert seg.rotation_angle() == pytest.approx(math.pi / 2)

    def test_negative_angle_flips_phase(self):
        """A negative angle adds pi to the drive phase."""
        assert drive_phase(GateKind.RX, -1.0) == pytest.approx(math.pi)
        assert drive_phase(GateKind.RY, 1.0) == pytest.approx(-math.pi / 2)

    def test_zero_angle_pulse_is_empty(self):
        """Rotations by zero produce no controls."""
        assert schedule_rxy(1, 0.0, 0.0, 0.3, 85.0).is_empty

    def test_non_positive_amplitude(self):
        """Drive amplitudes must be positive."""
        with pytest.raises(ScheduleError):
            schedule_rxy(1, 1.0, 0.0, 0.0, 85.0)


class TestZRotations:
    """Frequency-step z rotations."""

    def test_duration_and_sign(self):
        """Rz(pi/2) with a 1 MHz shift lasts 0.25 us and steps downwards."""
        schedule = schedule_rz(1, math.pi / 2, 1.0)
        (seg,) = schedule.steps
        assert seg.duration_us == pytest.approx(0.25)
        assert seg.amplitude_mhz == pytest.approx(-1.0)
        assert seg.channel is Channel.SHIFT_1

    def test_zero_shift(self):
        """A zero frequency shift cannot rotate."""
        with pytest.raises(ScheduleError):
            schedule_rz(1, 1.0, 0.0)

    def test_rz_fidelity(self, quiet_params):
        """A simulated z window realizes Rz(pi/2) on NR1."""
        gates = [GateSpec.rz(1, math.pi / 2)]
        report = gate_fidelity_experiment(
            quiet_params, schedule_gates(gates, quiet_params), rotation_unitary("z", math.pi / 2, 1)
        )
        assert report.min > 0.9999
        assert report.leakage < 1e-8

    @pytest.mark.parametrize("qubit", [1, 2])
    def test_rz_then_inverse_is_identity(self, quiet_params, qubit):
        """Rz(theta) followed by Rz(-theta) returns every input state."""
        builder = ScheduleBuilder(quiet_params)
        builder.add_gates([GateSpec.rz(qubit, 0.7)]).add_gates([GateSpec.rz(qubit, -0.7)])
        schedule = builder.build()
        assert len(schedule.steps) == 2
        report = gate_fidelity_experiment(
            quiet_params, schedule, np.eye(4), integrator=IntegratorConfig(resolution=200.0)
        )
        assert report.min > 1.0 - 1e-6


class TestWindows:
    """Grouping of gates into windows."""

    def test_parallel_drives_share_window(self):
        """Drives on different qubits run together."""
        windows = group_windows([GateSpec.rx(1, 1.0), GateSpec.ry(2, 1.0)])
        assert [w.kind for w in windows] == [WindowKind.DRIVE]
        assert set(windows[0].drives) == {1, 2}

    def test_same_qubit_drives_serialize(self):
        """Two drives on one qubit need two windows."""
        windows = group_windows([GateSpec.rx(1, 1.0), GateSpec.ry(1, 1.0)])
        assert len(windows) == 2

    def test_xy_adds_rephasing_window(self):
        """Every XY window is followed by a rephasing z window."""
        windows = group_windows([GateSpec.sqrt_iswap()])
        assert [w.kind for w in windows] == [WindowKind.XY, WindowKind.Z]
        assert windows[0].fraction == 1.0
        assert windows[1].rephasing

    def test_z_merges_into_rephasing(self):
        """A z rotation after an XY window joins the rephasing window."""
        windows = group_windows([GateSpec.xy(0.5), GateSpec.rz(1, 0.3), GateSpec.rz(2, 0.2)])
        assert len(windows) == 2
        assert windows[1].z_angles == {1: 0.3, 2: 0.2}

    def test_zero_rotations_dropped(self):
        """Rotations by zero vanish."""
        assert group_windows([GateSpec.rx(1, 0.0)]) == []


class TestXYTiming:
    """XY window timing at the gate-time transmon frequency."""

    def test_default_timing(self):
        """Midpoint tuning and pi / |Gamma| at 2.5 GHz."""
        timing = xy_timing(SystemParams(), PulseOptions())
        assert timing.common_mhz == pytest.approx(80.0)
        assert timing.gamma_mhz < 0
        assert timing.full_time_us == pytest.approx(0.5 / abs(timing.gamma_mhz))
        assert timing.detunings_mhz == pytest.approx((-5.0, 5.0))

    def test_transmon_too_close(self):
        """The transmon must stay far above the resonators."""
        with pytest.raises(ScheduleError):
            xy_timing(SystemParams(), PulseOptions(transmon_gate_mhz=100.0))

    def test_no_coupling(self, quiet_params):
        """Without g there is no XY interaction."""
        with pytest.raises(ScheduleError):
            xy_timing(quiet_params, PulseOptions())


class TestScheduleBuilder:
    """Rendering gate lists into schedules."""

    def test_markers_follow_cursor(self):
        """mark() records the cursor time."""
        schedule = ScheduleBuilder(SystemParams()).mark().add_gates([GateSpec.rz(2, math.pi / 2)]).mark().build()
        assert schedule.markers == pytest.approx((0.0, 0.25))

    def test_negative_idle(self):
        """Idle time cannot be negative."""
        with pytest.raises(ScheduleError):
            ScheduleBuilder(SystemParams()).idle(-1.0)

    def test_sqrt_iswap_steps_transmon(self):
        """The entangling window steps the transmon down to its gate frequency."""
        params = SystemParams()
        schedule = schedule_sqrt_iswap(params)
        (step,) = [s for s in schedule.steps if s.channel is Channel.TRANSMON]
        assert step.amplitude_mhz == pytest.approx(2500.0 - 10000.0)
        assert step.duration_us == pytest.approx(xy_timing(params, PulseOptions()).full_time_us)
        assert schedule.duration_us >= step.end_us

    def test_xy_window_aligned_to_beat(self):
        """XY windows start at zeros of the NR beat phase."""
        schedule = schedule_gates([GateSpec.rx(1, math.pi / 2), GateSpec.sqrt_iswap()], SystemParams())
        (step,) = [s for s in schedule.steps if s.channel is Channel.TRANSMON]
        beats = step.start_us * 10.0
        assert beats == pytest.approx(round(beats), abs=1e-9)
        assert step.start_us >= max(d.end_us for d in schedule.drives) - 1e-12

    def test_overlapping_segments_rejected(self):
        """Two steps on one channel may not overlap."""
        seg = dict(channel=Channel.SHIFT_1, duration_us=1.0, amplitude_mhz=1.0)
        with pytest.raises(ValidationError):
            PulseSchedule(
                steps=(StepSegment(start_us=0.0, **seg), StepSegment(start_us=0.5, **seg)),
                duration_us=2.0,
            )

    def test_text_form(self):
        """The text dump parses back to the same schedule."""
        schedule = schedule_gates([GateSpec.ry(1, 1.0), GateSpec.rz(2, 0.5)], SystemParams())
        assert schedule_from_text(schedule.to_text()) == schedule


class TestRenderedHamiltonian:
    """H(t) of a schedule."""

    def test_layout_mismatch(self):
        """The layout must match n_max."""
        with pytest.raises(ScheduleError):
            render_hamiltonian(PulseSchedule(), SystemParams(n_max=2), SubsystemLayout.hybrid(3))

    def test_split_is_consistent(self):
        """Frame energies plus the perturbation give the full Hamiltonian."""
        params = SystemParams(n_max=2)
        schedule = schedule_gates([GateSpec.rx(1, math.pi / 2)], params)
        provider = render_hamiltonian(schedule, params, SubsystemLayout.hybrid(2))
        t = 0.5 * schedule.duration_us
        full = provider.full(t, t)
        assert is_hermitian(full, atol=1e-9)
        assert np.allclose(provider.perturbation(t, t) + np.diag(provider.frame_energies), full)


@pytest.mark.slow
class TestDriveFidelity:
    """Full simulations of driven rotations."""

    def test_rx_half_pi(self, quiet_params):
        """A Gaussian drive realizes Rx(pi/2) on NR1."""
        gates = [GateSpec.rx(1, math.pi / 2)]
        report = gate_fidelity_experiment(
            quiet_params, schedule_gates(gates, quiet_params), sequence_unitary(gates)
        )
        assert report.mean > 0.99

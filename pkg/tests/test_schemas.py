"""Tests for Pydantic schemas."""

import math

import pytest
from pydantic import ValidationError

from nemsim.schemas.experiment import ExperimentConfig, IntegratorConfig, ResultTable
from nemsim.schemas.pulses import Channel, Envelope, GateKind, GateSpec, PulseOptions, StepSegment
from nemsim.schemas.spin import Axis, OneBodyTerm, SpinHamiltonianSpec
from nemsim.schemas.system import (
    NonlinearityModel,
    RabiParams,
    SystemParams,
    ThermalBathSpec,
    hz_to_per_us,
)


class TestSystemParams:
    """Tests for SystemParams."""

    def test_defaults(self):
        """Defaults describe the 85 / 75 MHz device with a 10 GHz transmon."""
        params = SystemParams()
        assert (params.omega1_mhz, params.omega2_mhz) == (85.0, 75.0)
        assert params.transmon_mhz == 10000.0
        assert params.beta1_mhz == 3.0
        assert params.detunings_mhz == (9915.0, 9925.0)
        assert params.n_max == 4

    def test_frozen(self):
        """Parameters are immutable."""
        with pytest.raises(ValidationError):
            SystemParams().omega1_mhz = 90.0

    def test_negative_rate(self):
        """Rates cannot be negative."""
        with pytest.raises(ValidationError):
            SystemParams(gamma1_hz=-1.0)

    def test_resonant_transmon(self):
        """A transmon resonant with an NR is rejected."""
        with pytest.raises(ValidationError):
            SystemParams(transmon_mhz=85.0)

    def test_non_perturbative_warning(self, caplog):
        """Large g / Delta is accepted with a warning."""
        SystemParams(transmon_mhz=200.0, g1_mhz=20.0, g2_mhz=20.0)
        assert "not perturbative" in caplog.text

    def test_quartic_has_no_kerr_shift(self):
        """Single-qubit shifts are only defined for the Kerr model."""
        params = SystemParams(nonlinearity1=NonlinearityModel.quartic(0.01))
        with pytest.raises(ValueError):
            _ = params.beta1_mhz

    def test_rate_conversion(self):
        """1e6 Hz is 1 per microsecond."""
        assert hz_to_per_us(1e6) == pytest.approx(1.0)


class TestRabiParams:
    """Tests for RabiParams."""

    def test_sc_above_nr(self):
        """The SC element must sit above the NR."""
        with pytest.raises(ValidationError):
            RabiParams(omega_nr_mhz=500.0, omega_sc_mhz=100.0)


class TestThermalBathSpec:
    """Tests for ThermalBathSpec."""

    def test_occupation_from_temperature(self):
        """Bose-Einstein occupation when only a temperature is given."""
        bath = ThermalBathSpec(nbar=None, temperature_mhz=100.0)
        assert bath.occupation(85.0) == pytest.approx(1.0 / math.expm1(0.85))

    def test_explicit_occupation_wins(self):
        """nbar overrides the temperature."""
        assert ThermalBathSpec(nbar=0.2, temperature_mhz=100.0).occupation(85.0) == 0.2

    def test_needs_one(self):
        """Either nbar or a temperature is required."""
        with pytest.raises(ValidationError):
            ThermalBathSpec(nbar=None)


class TestPulseSchemas:
    """Tests for gate and segment schemas."""

    def test_rotation_needs_qubit(self):
        """Rotations name a qubit."""
        with pytest.raises(ValidationError):
            GateSpec(kind=GateKind.RX, angle=1.0)

    def test_xy_on_both(self):
        """XY windows act on both qubits."""
        with pytest.raises(ValidationError):
            GateSpec(kind=GateKind.XY, qubit=1, fraction=0.5)

    def test_gate_text(self):
        """Gates render as one line each."""
        assert GateSpec.rz(2, 0.5).to_text() == "rz 2 0.5"
        assert GateSpec.xy(0.25).to_text() == "xy 12 0.25"

    def test_non_finite_angle(self):
        """Angles must be finite."""
        with pytest.raises(ValidationError):
            GateSpec.rx(1, math.inf)

    def test_ramp_fits(self):
        """Ramps cannot exceed half the step."""
        with pytest.raises(ValidationError):
            StepSegment(channel=Channel.TRANSMON, start_us=0.0, duration_us=1.0, amplitude_mhz=1.0, ramp_us=0.6)

    def test_ramped_value(self):
        """Linear rise to the plateau."""
        seg = StepSegment(channel=Channel.TRANSMON, start_us=0.0, duration_us=1.0, amplitude_mhz=2.0, ramp_us=0.2)
        assert seg.value(0.1) == pytest.approx(1.0)
        assert seg.value(0.5) == pytest.approx(2.0)

    def test_square_envelope(self):
        """Square envelopes are one inside and zero outside."""
        env = Envelope.square(1.0, 2.0)
        assert float(env.value(2.0)) == 1.0
        assert float(env.value(3.5)) == 0.0
        assert env.area() == 2.0

    def test_pulse_defaults(self):
        """Default drive and transmon gate settings."""
        options = PulseOptions()
        assert options.drive_amplitude_mhz == 0.3
        assert options.transmon_gate_mhz == 2500.0


class TestSpinSchemas:
    """Tests for spin Hamiltonian schemas."""

    def test_empty(self):
        """A spec without terms is empty."""
        assert SpinHamiltonianSpec().is_empty
        one = OneBodyTerm(qubit=1, axis=Axis.Z, coefficient_mhz=0.1)
        assert not SpinHamiltonianSpec(one_body=(one,)).is_empty

    def test_non_finite_coefficient(self):
        """Coefficients must be finite."""
        with pytest.raises(ValidationError):
            OneBodyTerm(qubit=1, axis=Axis.X, coefficient_mhz=math.nan)


class TestExperimentSchemas:
    """Tests for integrator, experiment and table schemas."""

    def test_relaxed_resolution(self):
        """Relaxing divides the resolution."""
        assert IntegratorConfig().relaxed().resolution == 10.0

    def test_relaxed_explicit_step(self):
        """Relaxing an explicit step multiplies it."""
        assert IntegratorConfig(step_us=0.01).relaxed().step_us == pytest.approx(0.04)

    def test_unsorted_sweep(self):
        """Sweep values must be sorted."""
        with pytest.raises(ValidationError):
            ExperimentConfig(experiment="fig2", sweeps={"g_mhz": (10.0, 0.0)})

    def test_empty_sweep(self):
        """Sweeps cannot be empty."""
        with pytest.raises(ValidationError):
            ExperimentConfig(experiment="fig2", sweeps={"g_mhz": ()})

    def test_ragged_table(self):
        """Rows must match the header width."""
        with pytest.raises(ValidationError):
            ResultTable(headers=("a", "b"), rows=[(1.0,)])

    def test_column(self):
        """Columns are read by header name."""
        table = ResultTable(headers=("a", "b"), rows=[(1.0, 2.0), (3.0, 4.0)])
        assert table.column("b") == [2.0, 4.0]

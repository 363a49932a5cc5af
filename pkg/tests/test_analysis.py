"""Tests for fidelities, computational blocks and spin observables."""

import math

import numpy as np
import pytest

from nemsim.errors import DimensionMismatchError, NumericInputError
from nemsim.physics.analysis import (
    FidelityReport,
    computational_block,
    fidelities,
    fidelity,
    gate_fidelity_experiment,
    leakage,
    leakage_trace,
    observable_trace,
    spin_observables,
    standard_input_states,
)
from nemsim.physics.dynamics import Trajectory, pure_density
from nemsim.physics.operators import (
    NR1,
    NR2,
    TRANSMON,
    TRANSMON_EXCITED,
    TRANSMON_GROUND,
    computational_state,
    product_state,
)
from nemsim.physics.pulses import schedule_rxy
from nemsim.schemas.experiment import Frame
from nemsim.schemas.pulses import EnvelopeKind, PulseSchedule

R = 1.0 / math.sqrt(2.0)


def ground_state(layout, nr1=0, nr2=0):
    return product_state(layout, {NR1: nr1, TRANSMON: TRANSMON_GROUND, NR2: nr2})


class TestFidelity:
    """State fidelity sqrt(<psi|rho|psi>)."""

    def test_identical_and_orthogonal(self):
        """1 for the same pure state and 0 for an orthogonal one."""
        psi = np.array([R, R], dtype=complex)
        rho = pure_density(psi)
        assert fidelity(rho, psi) == pytest.approx(1.0)
        assert fidelity(rho, np.array([R, -R])) == pytest.approx(0.0, abs=1e-8)

    def test_mixed_state(self):
        """Maximally mixed qubit has fidelity 1/sqrt(2)."""
        assert fidelity(0.5 * np.eye(2), np.array([1.0, 0.0])) == pytest.approx(R)

    def test_dimension_mismatch(self):
        """Kets must match the density-matrix dimension."""
        with pytest.raises(DimensionMismatchError):
            fidelity(np.eye(4) / 4, np.array([1.0, 0.0]))

    def test_unnormalized_target(self):
        """Target kets must be normalized."""
        with pytest.raises(NumericInputError):
            fidelity(np.eye(2) / 2, np.array([1.0, 1.0]))

    def test_stacked(self):
        """Fidelities are evaluated member by member."""
        kets = np.eye(2, dtype=complex)
        rhos = np.stack([pure_density(kets[0]), pure_density(kets[0])])
        assert np.allclose(fidelities(rhos, kets), [1.0, 0.0])


class TestInputStates:
    """The nine standard input states."""

    def test_count_and_labels(self):
        """Nine normalized states with distinct labels."""
        states = standard_input_states()
        labels = [label for label, _ in states]
        assert len(states) == 9
        assert len(set(labels)) == 9
        for _, amps in states:
            assert np.linalg.norm(amps) == pytest.approx(1.0)

    def test_bell_state(self):
        """The entangled input is (|00> + |11>) / sqrt(2)."""
        bell = dict(standard_input_states())["bell"]
        assert np.allclose(bell, [R, 0, 0, R])


class TestComputationalBlock:
    """Reduction to the two-qubit block."""

    def test_discarded_weight(self, small_layout):
        """Population in Fock level 2 is discarded and the rest renormalized."""
        rho = 0.5 * pure_density(ground_state(small_layout)) + 0.5 * pure_density(
            ground_state(small_layout, nr1=2)
        )
        block, discarded = computational_block(rho, small_layout)
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        assert discarded == pytest.approx(0.5)
        assert np.allclose(block, expected)

    def test_embedded_state_round_trip(self, small_layout):
        """An embedded two-qubit state reduces to itself."""
        amps = np.array([0.5, 0.5j, -0.5, 0.5])
        rho = pure_density(computational_state(amps, small_layout))
        block, discarded = computational_block(rho, small_layout)
        assert discarded == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(block, np.outer(amps, amps.conj()))

    def test_wrong_shape(self, small_layout):
        """States must fit the layout."""
        with pytest.raises(DimensionMismatchError):
            computational_block(np.eye(4), small_layout)

    def test_leakage(self, small_layout):
        """Fock level 2 and the excited transmon count as leakage."""
        high = pure_density(ground_state(small_layout, nr2=2))
        excited = pure_density(
            product_state(small_layout, {NR1: 0, TRANSMON: TRANSMON_EXCITED, NR2: 0})
        )
        inside = pure_density(ground_state(small_layout, nr1=1, nr2=1))
        assert leakage(np.stack([high, excited, inside]), small_layout) == pytest.approx(
            [1.0, 1.0, 0.0]
        )

    def test_leakage_trace_takes_largest_sample(self, small_layout):
        """The trace reports the worst stored sample, not the last one."""
        inside = pure_density(ground_state(small_layout, nr1=1))
        high = pure_density(ground_state(small_layout, nr1=2))
        mixed = 0.7 * inside + 0.3 * high
        trajectory = Trajectory(
            times=np.array([0.0, 0.5, 1.0]),
            states=np.stack([inside, mixed, inside]),
            frame=Frame.INTERACTION,
            frame_energies=np.zeros(small_layout.total_dim),
            step_us=0.1,
        )
        assert leakage_trace(trajectory, small_layout) == pytest.approx(0.3)


class TestSpinObservables:
    """S = s1 + s2 with spin up = |0>."""

    def test_all_up(self):
        """|00> has S_z = 1 and S_x = 0."""
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0
        sz, sx = spin_observables(rho)
        assert sz == pytest.approx(1.0)
        assert sx == pytest.approx(0.0)

    def test_plus_plus(self):
        """|++> has S_x = 1."""
        plus = np.full(4, 0.5, dtype=complex)
        sz, sx = spin_observables(pure_density(plus))
        assert sz == pytest.approx(0.0, abs=1e-12)
        assert sx == pytest.approx(1.0)

    def test_trace_from_trajectory(self, small_layout):
        """observable_trace evaluates every stored sample."""
        states = np.stack(
            [
                pure_density(ground_state(small_layout)),
                pure_density(ground_state(small_layout, nr1=1, nr2=1)),
            ]
        )
        trajectory = Trajectory(
            times=np.array([0.0, 1.0]),
            states=states,
            frame=Frame.INTERACTION,
            frame_energies=np.zeros(small_layout.total_dim),
            step_us=0.1,
        )
        trace = observable_trace(trajectory, small_layout)
        assert np.allclose(trace.s_z, [1.0, -1.0])
        assert np.allclose(trace.leakage, 0.0)


class TestFidelityReport:
    """Aggregated gate fidelities."""

    def test_summary(self):
        """Mean, minimum and label mapping."""
        report = FidelityReport(labels=("a", "b"), fidelities=(0.9, 1.0))
        assert report.mean == pytest.approx(0.95)
        assert report.min == pytest.approx(0.9)
        assert report.as_dict() == {"a": 0.9, "b": 1.0}

    def test_target_shape(self, quiet_params):
        """Targets are 4x4 unitaries."""
        with pytest.raises(DimensionMismatchError):
            gate_fidelity_experiment(quiet_params, PulseSchedule(), np.eye(2))

    def test_idle_is_identity(self, quiet_params):
        """An empty schedule without noise leaves every input unchanged."""
        report = gate_fidelity_experiment(quiet_params, PulseSchedule(duration_us=0.2), np.eye(4))
        assert report.min == pytest.approx(1.0, abs=1e-9)

    def test_leakage_samples_validated(self, quiet_params):
        """At least one leakage interval is needed."""
        with pytest.raises(NumericInputError):
            gate_fidelity_experiment(
                quiet_params, PulseSchedule(duration_us=0.2), np.eye(4), leakage_samples=0
            )

    def test_leakage_peaks_inside_the_gate(self, quiet_params):
        """A square Rx(pi) leaks into Fock level 2 mid-pulse more than at its end."""
        schedule = schedule_rxy(1, math.pi, 0.0, 0.3, 85.0, EnvelopeKind.SQUARE)
        inputs = [s for s in standard_input_states() if s[0] in ("00", "10")]
        target = np.kron(np.array([[0, -1j], [-1j, 0]]), np.eye(2))

        def run(samples):
            return gate_fidelity_experiment(
                quiet_params, schedule, target, inputs, leakage_samples=samples
            )

        dense, ends = run(64), run(1)
        assert dense.leakage > 1.2 * ends.leakage
        assert dense.leakage < 0.05
        assert dense.fidelities == pytest.approx(ends.fidelities, abs=1e-6)

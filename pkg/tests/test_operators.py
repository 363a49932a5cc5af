"""Tests for the operator algebra."""

import numpy as np
import pytest

from nemsim.errors import DimensionMismatchError, InvalidDimensionError, NumericInputError
from nemsim.physics.operators import (
    NR1,
    NR2,
    TRANSMON,
    TRANSMON_GROUND,
    SubsystemLayout,
    annihilation_operator,
    basis_index,
    computational_indices,
    computational_state,
    embed,
    is_hermitian,
    matrix_exponential,
    number_operator,
    pauli,
    product_state,
)


class TestLadderOperators:
    """Tests for truncated bosonic operators."""

    def test_annihilation_matrix_elements(self):
        """<n-1|b|n> should equal sqrt(n)."""
        b = annihilation_operator(5)
        for n in range(1, 5):
            assert b[n - 1, n] == pytest.approx(np.sqrt(n))
        assert np.count_nonzero(b) == 4

    def test_number_operator_is_bdag_b(self):
        """b+b should equal the number operator."""
        b = annihilation_operator(6)
        assert np.allclose(b.conj().T @ b, number_operator(6))

    def test_dimension_below_two_rejected(self):
        """A mode needs at least two levels."""
        with pytest.raises(InvalidDimensionError):
            annihilation_operator(1)

    def test_unknown_pauli_axis(self):
        """Unknown axis names should raise ValueError."""
        with pytest.raises(ValueError):
            pauli("w")

    def test_transmon_lowering_maps_excited_to_ground(self):
        """sigma_- takes index 0 (excited) to index 1 (ground)."""
        down = pauli("-") @ np.array([1, 0], dtype=complex)
        assert np.allclose(down, [0, 1])


class TestLayout:
    """Tests for SubsystemLayout and embedding."""

    def test_hybrid_dims(self):
        """Hybrid layout should be NR1 x transmon x NR2."""
        layout = SubsystemLayout.hybrid(4)
        assert layout.names == (NR1, TRANSMON, NR2)
        assert layout.dims == (5, 2, 5)
        assert layout.total_dim == 50

    def test_invalid_layouts(self):
        """Short dims and duplicate names should be rejected."""
        with pytest.raises(InvalidDimensionError):
            SubsystemLayout(names=("a", "b"), dims=(2, 1))
        with pytest.raises(InvalidDimensionError):
            SubsystemLayout(names=("a", "a"), dims=(2, 2))
        with pytest.raises(DimensionMismatchError):
            SubsystemLayout(names=("a",), dims=(2, 2))

    def test_unknown_slot(self):
        """Looking up a missing subsystem should raise."""
        with pytest.raises(DimensionMismatchError):
            SubsystemLayout.hybrid(2).slot("nr3")

    def test_embed_acts_on_one_slot(self, small_layout):
        """Embedded number operator counts only its own mode."""
        n2 = embed(number_operator(3), NR2, small_layout)
        psi = product_state(small_layout, {NR1: 2, NR2: 1})
        assert np.vdot(psi, n2 @ psi).real == pytest.approx(1.0)
        assert n2.shape == (18, 18)

    def test_embed_by_index_matches_name(self, small_layout):
        """Slots can be addressed by name or index."""
        op = pauli("x")
        assert np.array_equal(embed(op, 1, small_layout), embed(op, TRANSMON, small_layout))

    def test_embed_shape_mismatch(self, small_layout):
        """An operator of the wrong size should raise."""
        with pytest.raises(DimensionMismatchError):
            embed(np.eye(4), NR1, small_layout)


class TestMatrixExponential:
    """Tests for matrix_exponential."""

    def test_self_inverse(self):
        """exp(A) exp(-A) should be the identity for Hermitian A."""
        rng = np.random.default_rng(7)
        for dim in (2, 5, 16):
            m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            a = m + m.conj().T
            a /= np.linalg.norm(a, 2)
            product = matrix_exponential(a) @ matrix_exponential(-a)
            assert np.allclose(product, np.eye(dim), rtol=0, atol=1e-12)

    def test_unitary_for_anti_hermitian(self):
        """exp(-iH) should be unitary."""
        h = np.array([[1.0, 0.3 - 0.2j], [0.3 + 0.2j, -0.5]])
        u = matrix_exponential(-1j * h)
        assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-13)

    def test_general_matrix(self):
        """Nilpotent input should give I + A."""
        a = np.array([[0.0, 2.0], [0.0, 0.0]])
        assert np.allclose(matrix_exponential(a), [[1.0, 2.0], [0.0, 1.0]])

    def test_rejects_non_finite(self):
        """NaN entries should raise NumericInputError."""
        with pytest.raises(NumericInputError):
            matrix_exponential(np.array([[np.nan, 0], [0, 1]]))

    def test_rejects_non_square(self):
        """Rectangular input should raise."""
        with pytest.raises(DimensionMismatchError):
            matrix_exponential(np.zeros((2, 3)))


class TestBasis:
    """Tests for basis helpers."""

    def test_computational_order(self, small_layout):
        """Indices should follow 00, 01, 10, 11 with the transmon in its ground state."""
        expected = [
            basis_index(small_layout, {NR1: q1, TRANSMON: TRANSMON_GROUND, NR2: q2})
            for q1, q2 in ((0, 0), (0, 1), (1, 0), (1, 1))
        ]
        assert computational_indices(small_layout) == expected

    def test_computational_state_embedding(self, small_layout):
        """Amplitudes land on the computational indices only."""
        amps = np.array([0.6, 0, 0, 0.8], dtype=complex)
        psi = computational_state(amps, small_layout)
        assert np.linalg.norm(psi) == pytest.approx(1.0)
        assert np.allclose(psi[computational_indices(small_layout)], amps)

    def test_computational_state_wrong_size(self, small_layout):
        """Only four amplitudes are accepted."""
        with pytest.raises(DimensionMismatchError):
            computational_state(np.ones(3), small_layout)

    def test_level_outside_cutoff(self, small_layout):
        """Fock levels beyond n_max should raise."""
        with pytest.raises(DimensionMismatchError):
            basis_index(small_layout, {NR1: 3})

    def test_is_hermitian(self):
        """Pauli x is Hermitian, the ladder operator is not."""
        assert is_hermitian(pauli("x"))
        assert not is_hermitian(pauli("+"))

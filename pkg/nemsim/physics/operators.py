"""Truncated-Fock and qubit operator algebra.

The global layout is (NR1, transmon, NR2). The transmon basis puts the excited
state first: index 0 = up, index 1 = down, so sigma_z = diag(+1, -1) and
H = (Omega / 2) sigma_z raises the excited level. Qubit states of a
nanoresonator are its Fock levels 0 and 1.
"""

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.linalg import expm

from nemsim.errors import DimensionMismatchError, InvalidDimensionError, NumericInputError

NR1 = "nr1"
TRANSMON = "transmon"
NR2 = "nr2"

TRANSMON_EXCITED = 0
TRANSMON_GROUND = 1

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    # raising: |down> -> |up>
    "+": np.array([[0, 1], [0, 0]], dtype=complex),
    "-": np.array([[0, 0], [1, 0]], dtype=complex),
}

# Pauli matrices on a qubit encoded in Fock levels |0>, |1>.
QUBIT_PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": _PAULI["x"],
    "y": _PAULI["y"],
    "z": _PAULI["z"],
}


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered named subsystems and their dimensions."""

    names: tuple[str, ...]
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.names) != len(self.dims):
            raise DimensionMismatchError("layout names and dims differ in length")
        if len(set(self.names)) != len(self.names):
            raise InvalidDimensionError("layout names must be unique")
        if any(d < 2 for d in self.dims):
            raise InvalidDimensionError(f"all subsystem dims must be >= 2, got {self.dims}")

    @classmethod
    def hybrid(cls, n_max: int) -> "SubsystemLayout":
        """NR1 (n_max + 1) x transmon (2) x NR2 (n_max + 1)."""
        return cls(names=(NR1, TRANSMON, NR2), dims=(n_max + 1, 2, n_max + 1))

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def slot(self, name: str | int) -> int:
        if isinstance(name, int):
            if not 0 <= name < len(self.dims):
                raise DimensionMismatchError(f"slot {name} outside layout of {len(self.dims)}")
            return name
        try:
            return self.names.index(name)
        except ValueError:
            raise DimensionMismatchError(f"no subsystem named {name!r}") from None

    def dim(self, name: str | int) -> int:
        return self.dims[self.slot(name)]


def annihilation_operator(dim: int) -> np.ndarray:
    """Truncated b with <n-1|b|n> = sqrt(n)."""
    if dim < 2:
        raise InvalidDimensionError(f"bosonic mode needs dim >= 2, got {dim}")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def number_operator(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def pauli(axis: str) -> np.ndarray:
    """Transmon Pauli or ladder matrix for axis in {x, y, z, +, -}."""
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}") from None


def embed(op: np.ndarray, slot: str | int, layout: SubsystemLayout) -> np.ndarray:
    """I x ... x op x ... x I in layout order."""
    index = layout.slot(slot)
    op = np.asarray(op, dtype=complex)
    if op.shape != (layout.dims[index], layout.dims[index]):
        raise DimensionMismatchError(
            f"operator of shape {op.shape} does not fit slot {layout.names[index]} "
            f"of dim {layout.dims[index]}"
        )
    factors = [
        op if i == index else np.eye(d, dtype=complex) for i, d in enumerate(layout.dims)
    ]
    return reduce(np.kron, factors)


def matrix_exponential(a: np.ndarray) -> np.ndarray:
    """exp(a), spectral for (anti-)Hermitian input and Pade otherwise."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"matrix exponential needs a square matrix, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NumericInputError("matrix exponential of non-finite input")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.allclose(a, a.conj().T, atol=1e-14 * scale, rtol=0):
        w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
        return (v * np.exp(w)) @ v.conj().T
    if np.allclose(a, -a.conj().T, atol=1e-14 * scale, rtol=0):
        h = 0.5j * (a - a.conj().T)  # a = -i h
        w, v = np.linalg.eigh(h)
        return (v * np.exp(-1j * w)) @ v.conj().T
    return expm(a)


def basis_index(layout: SubsystemLayout, occupations: dict[str, int]) -> int:
    """Flat index of a product basis state; unspecified subsystems default to 0."""
    levels = [occupations.get(name, 0) for name in layout.names]
    for name, level, d in zip(layout.names, levels, layout.dims):
        if not 0 <= level < d:
            raise DimensionMismatchError(f"level {level} outside {name} of dim {d}")
    return int(np.ravel_multi_index(levels, layout.dims))


def product_state(layout: SubsystemLayout, occupations: dict[str, int]) -> np.ndarray:
    psi = np.zeros(layout.total_dim, dtype=complex)
    psi[basis_index(layout, occupations)] = 1.0
    return psi


def computational_indices(layout: SubsystemLayout) -> list[int]:
    """Flat indices of |q1 q2> (transmon ground), ordered 00, 01, 10, 11."""
    return [
        basis_index(layout, {NR1: q1, TRANSMON: TRANSMON_GROUND, NR2: q2})
        for q1 in (0, 1)
        for q2 in (0, 1)
    ]


def computational_state(amplitudes: np.ndarray, layout: SubsystemLayout) -> np.ndarray:
    """Embed a two-qubit vector (order 00, 01, 10, 11) into the full space."""
    amplitudes = np.asarray(amplitudes, dtype=complex)
    if amplitudes.shape != (4,):
        raise DimensionMismatchError(f"two-qubit state needs 4 amplitudes, got {amplitudes.shape}")
    psi = np.zeros(layout.total_dim, dtype=complex)
    psi[computational_indices(layout)] = amplitudes
    return psi


def two_qubit_operator(first: str, second: str) -> np.ndarray:
    """sigma_first (qubit 1) x sigma_second (qubit 2) on the 4-dim space."""
    return np.kron(QUBIT_PAULI[first], QUBIT_PAULI[second])


def single_qubit_operator(axis: str, qubit: int) -> np.ndarray:
    return two_qubit_operator(axis, "i") if qubit == 1 else two_qubit_operator("i", axis)


def is_hermitian(op: np.ndarray, atol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(op - op.conj().T), initial=0.0) <= atol)

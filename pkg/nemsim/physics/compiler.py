"""Trotter compilation of two-spin Hamiltonians into native gates.

Native gates are single-qubit rotations R_a(phi) = exp(-i phi sigma_a / 2)
and XY windows exp(-i s (pi f / 8)(XX + YY)), where f is the window length
in units of pi/|Gamma| and s = sign(Gamma). Couplings J are in MHz and a
term J P evolves as exp(-i 2 pi J P t).

Identities used (time order, first gate applied first):

* XY with sign(J) != s: Rz1(-pi), XY(-J), Rz1(pi)
* XY-minus: Rx1(-pi), XY(J), Rx1(pi) when sign(J) == s, otherwise
  Ry1(-pi), XY(-J), Ry1(pi)
* XZ / YZ: Rx12(-pi/2) or Ry12(-pi/2), XY(J), then the inverse rotations
* XX = XY-minus(J/2) followed by XY(J/2); other products a(1) b(2) conjugate
  XX with y -> Rz(pi/2), z -> Ry(-pi/2)
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from nemsim.errors import CompileError
from nemsim.physics.operators import QUBIT_PAULI, matrix_exponential, two_qubit_operator
from nemsim.physics.pulses import WindowKind, group_windows
from nemsim.schemas.pulses import GateKind, GateSpec
from nemsim.schemas.spin import (
    Axis,
    ExchangeForm,
    ExchangeTerm,
    OneBodyTerm,
    SpinHamiltonianSpec,
    TwoBodyTerm,
)
from nemsim.schemas.system import TWO_PI

PI = math.pi

EXCHANGE_OPERATORS = {
    ExchangeForm.XY: (("x", "x", 1.0), ("y", "y", 1.0)),
    ExchangeForm.XY_MINUS: (("x", "x", 1.0), ("y", "y", -1.0)),
    ExchangeForm.XZ: (("x", "x", 1.0), ("z", "z", 1.0)),
    ExchangeForm.YZ: (("y", "y", 1.0), ("z", "z", 1.0)),
}

_ROTATION_AXIS = {GateKind.RX: "x", GateKind.RY: "y", GateKind.RZ: "z"}


def exchange_operator(form: ExchangeForm) -> np.ndarray:
    return sum(c * two_qubit_operator(a, b) for a, b, c in EXCHANGE_OPERATORS[form])


def rotation_unitary(axis: str, angle: float, qubit: int) -> np.ndarray:
    single = (
        math.cos(angle / 2) * QUBIT_PAULI["i"] - 1j * math.sin(angle / 2) * QUBIT_PAULI[axis]
    )
    eye = QUBIT_PAULI["i"]
    return np.kron(single, eye) if qubit == 1 else np.kron(eye, single)


def xy_unitary(fraction: float, gamma_sign: int) -> np.ndarray:
    """Ideal XY window: identity on |00>, |11>; cos / -i sin block on |01>, |10>."""
    phi = gamma_sign * PI * fraction / 4.0
    u = np.eye(4, dtype=complex)
    u[1, 1] = u[2, 2] = math.cos(phi)
    u[1, 2] = u[2, 1] = -1j * math.sin(phi)
    return u


def gate_unitary(gate: GateSpec, gamma_sign: int = -1) -> np.ndarray:
    """4x4 ideal unitary of a native gate."""
    if gate.is_rotation:
        return rotation_unitary(_ROTATION_AXIS[gate.kind], gate.angle, gate.qubit)
    fraction = gate.fraction if gate.kind is GateKind.XY else 1.0
    return xy_unitary(fraction, gamma_sign)


def sequence_unitary(gates: Sequence[GateSpec], gamma_sign: int = -1) -> np.ndarray:
    """Product of gate unitaries, later gates on the left."""
    u = np.eye(4, dtype=complex)
    for gate in gates:
        u = gate_unitary(gate, gamma_sign) @ u
    return u


def _sign(x: float) -> int:
    return 1 if x > 0 else -1


def _both(kind: GateKind, angle: float) -> list[GateSpec]:
    return [GateSpec(kind=kind, qubit=1, angle=angle), GateSpec(kind=kind, qubit=2, angle=angle)]


def _native_xy(coupling_mhz: float, time_us: float) -> GateSpec:
    return GateSpec.xy(16.0 * abs(coupling_mhz) * time_us)


def compile_exchange(
    form: ExchangeForm, coupling_mhz: float, time_us: float, gamma_sign: int = -1
) -> list[GateSpec]:
    """Gates for exp(-i 2 pi J (exchange form) t)."""
    if coupling_mhz == 0 or time_us == 0:
        return []
    if time_us < 0:
        raise CompileError("evolution time must be non-negative")
    if form is ExchangeForm.XY:
        if _sign(coupling_mhz) == gamma_sign:
            return [_native_xy(coupling_mhz, time_us)]
        return [GateSpec.rz(1, -PI), _native_xy(coupling_mhz, time_us), GateSpec.rz(1, PI)]
    if form is ExchangeForm.XY_MINUS:
        if _sign(coupling_mhz) == gamma_sign:
            return [GateSpec.rx(1, -PI), _native_xy(coupling_mhz, time_us), GateSpec.rx(1, PI)]
        return [GateSpec.ry(1, -PI), _native_xy(coupling_mhz, time_us), GateSpec.ry(1, PI)]
    inner = compile_exchange(ExchangeForm.XY, coupling_mhz, time_us, gamma_sign)
    kind = GateKind.RX if form is ExchangeForm.XZ else GateKind.RY
    return _both(kind, -PI / 2) + inner + _both(kind, PI / 2)


# W with W X W+ = sigma_axis
_AXIS_FROM_X = {
    Axis.X: None,
    Axis.Y: (GateKind.RZ, PI / 2),
    Axis.Z: (GateKind.RY, -PI / 2),
}


def compile_two_body(
    first: Axis | str,
    second: Axis | str,
    coupling_mhz: float,
    time_us: float,
    gamma_sign: int = -1,
) -> list[GateSpec]:
    """Gates for exp(-i 2 pi J sigma_first(1) sigma_second(2) t)."""
    try:
        first, second = Axis(first), Axis(second)
    except ValueError as exc:
        raise CompileError(f"unsupported axis pair ({first}, {second})") from exc
    if coupling_mhz == 0 or time_us == 0:
        return []
    half = 0.5 * coupling_mhz
    core = compile_exchange(ExchangeForm.XY_MINUS, half, time_us, gamma_sign) + compile_exchange(
        ExchangeForm.XY, half, time_us, gamma_sign
    )
    before: list[GateSpec] = []
    after: list[GateSpec] = []
    for qubit, axis in ((1, first), (2, second)):
        basis = _AXIS_FROM_X[axis]
        if basis is None:
            continue
        kind, angle = basis
        before.append(GateSpec(kind=kind, qubit=qubit, angle=-angle))
        after.append(GateSpec(kind=kind, qubit=qubit, angle=angle))
    return before + core + after


def compile_one_body(term: OneBodyTerm, time_us: float) -> list[GateSpec]:
    """coefficient * s_axis = (coefficient / 2) sigma_axis -> R_axis(2 pi c t)."""
    angle = TWO_PI * term.coefficient_mhz * time_us
    if angle == 0:
        return []
    kind = {Axis.X: GateKind.RX, Axis.Y: GateKind.RY, Axis.Z: GateKind.RZ}[term.axis]
    return [GateSpec(kind=kind, qubit=term.qubit, angle=angle)]


def spin_hamiltonian_matrix(spec: SpinHamiltonianSpec) -> np.ndarray:
    """4x4 Hamiltonian in rad/us, with s = sigma / 2."""
    h = np.zeros((4, 4), dtype=complex)
    for term in spec.one_body:
        axes = (term.axis.value, "i") if term.qubit == 1 else ("i", term.axis.value)
        h += TWO_PI * term.coefficient_mhz / 2.0 * two_qubit_operator(*axes)
    for term in spec.two_body:
        h += TWO_PI * term.coefficient_mhz / 4.0 * two_qubit_operator(term.first.value, term.second.value)
    for term in spec.exchange:
        h += TWO_PI * term.coefficient_mhz / 4.0 * exchange_operator(term.form)
    return h


def _term_hamiltonians(spec: SpinHamiltonianSpec) -> list[np.ndarray]:
    """Trotter factors in application order: exchange, two-body, one-body."""
    parts = [SpinHamiltonianSpec(exchange=(t,)) for t in spec.exchange]
    parts += [SpinHamiltonianSpec(two_body=(t,)) for t in spec.two_body]
    parts += [SpinHamiltonianSpec(one_body=(t,)) for t in spec.one_body]
    return [spin_hamiltonian_matrix(p) for p in parts]


def compile_step(spec: SpinHamiltonianSpec, tau_us: float, gamma_sign: int = -1) -> list[GateSpec]:
    """One first-order Trotter step, terms in the order of ``_term_hamiltonians``."""
    gates: list[GateSpec] = []
    for term in spec.exchange:
        # s s products carry 1/4 relative to sigma sigma
        gates += compile_exchange(term.form, term.coefficient_mhz / 4.0, tau_us, gamma_sign)
    for term in spec.two_body:
        gates += compile_two_body(term.first, term.second, term.coefficient_mhz / 4.0, tau_us, gamma_sign)
    for term in spec.one_body:
        gates += compile_one_body(term, tau_us)
    return gates


@dataclass(frozen=True)
class TrotterPlan:
    """First-order Trotter decomposition of exp(-i H t) into N steps."""

    spec: SpinHamiltonianSpec
    total_time_us: float
    steps: int
    gamma_sign: int
    step_gates: tuple[tuple[GateSpec, ...], ...]
    prefix_unitaries: tuple[np.ndarray, ...]

    @property
    def tau_us(self) -> float:
        return self.total_time_us / self.steps

    @property
    def gates(self) -> list[GateSpec]:
        return [g for step in self.step_gates for g in step]

    def exact_unitary(self) -> np.ndarray:
        return matrix_exponential(-1j * spin_hamiltonian_matrix(self.spec) * self.total_time_us)


def trotterize(
    spec: SpinHamiltonianSpec, time_us: float, steps: int, gamma_sign: int = -1
) -> TrotterPlan:
    """N first-order Trotter steps of length t / N with exact per-prefix references."""
    if steps < 1:
        raise CompileError(f"Trotter step count must be >= 1, got {steps}")
    if time_us < 0:
        raise CompileError("evolution time must be non-negative")
    tau = time_us / steps
    step_unitary = np.eye(4, dtype=complex)
    for h in _term_hamiltonians(spec):
        step_unitary = matrix_exponential(-1j * h * tau) @ step_unitary
    prefixes = [np.eye(4, dtype=complex)]
    for _ in range(steps):
        prefixes.append(step_unitary @ prefixes[-1])
    gates = tuple(compile_step(spec, tau, gamma_sign))
    return TrotterPlan(
        spec=spec,
        total_time_us=time_us,
        steps=steps,
        gamma_sign=gamma_sign,
        step_gates=tuple(gates for _ in range(steps)),
        prefix_unitaries=tuple(prefixes),
    )


def reference_unitary(plan: TrotterPlan) -> np.ndarray:
    """Exact product of the plan's ideal gate unitaries."""
    return sequence_unitary(plan.gates, plan.gamma_sign)


def map_spin1(d_mhz: float, e_mhz: float) -> SpinHamiltonianSpec:
    """D S_z^2 + E (S_x^2 - S_y^2) -> 2D s_z s_z + 2E (s_x s_x - s_y s_y)."""
    two_body = (TwoBodyTerm(first=Axis.Z, second=Axis.Z, coefficient_mhz=2.0 * d_mhz),)
    exchange = (ExchangeTerm(form=ExchangeForm.XY_MINUS, coefficient_mhz=2.0 * e_mhz),)
    return SpinHamiltonianSpec(
        two_body=tuple(t for t in two_body if t.coefficient_mhz != 0),
        exchange=tuple(t for t in exchange if t.coefficient_mhz != 0),
        label="spin1",
    )


def tim_spec(coupling_mhz: float, field_mhz: float) -> SpinHamiltonianSpec:
    """Lambda s_x1 s_x2 + b (s_z1 + s_z2)."""
    return SpinHamiltonianSpec(
        two_body=(TwoBodyTerm(first=Axis.X, second=Axis.X, coefficient_mhz=coupling_mhz),),
        one_body=tuple(
            OneBodyTerm(qubit=q, axis=Axis.Z, coefficient_mhz=field_mhz) for q in (1, 2)
        ),
        label="tim",
    )


def spin1_hamiltonian(d_mhz: float, e_mhz: float) -> np.ndarray:
    """3x3 spin-1 Hamiltonian (MHz) in the basis m = +1, 0, -1."""
    r = 1.0 / math.sqrt(2.0)
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    sx = r * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)
    sy = r * np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex)
    return d_mhz * sz @ sz + e_mhz * (sx @ sx - sy @ sy)


def triplet_basis() -> np.ndarray:
    """Columns |00>, (|01> + |10>)/sqrt2, |11> (m = +1, 0, -1)."""
    r = 1.0 / math.sqrt(2.0)
    basis = np.zeros((4, 3), dtype=complex)
    basis[0, 0] = 1.0
    basis[1, 1] = basis[2, 1] = r
    basis[3, 2] = 1.0
    return basis


@dataclass(frozen=True)
class WindowCount:
    two_qubit: int
    single_qubit: int


def count_windows(gates: Sequence[GateSpec]) -> WindowCount:
    """XY windows and single-qubit (drive or z) windows after grouping."""
    windows = group_windows(gates)
    two = sum(1 for w in windows if w.kind is WindowKind.XY)
    return WindowCount(two_qubit=two, single_qubit=len(windows) - two)


def plan_to_text(plan: TrotterPlan) -> str:
    """Line-oriented gate list: kind qubit(s) angle-or-fraction."""
    lines = [
        f"# spec {plan.spec.label}",
        f"# steps {plan.steps}",
        f"# tau_us {plan.tau_us!r}",
        f"# gamma_sign {plan.gamma_sign}",
    ]
    for index, step in enumerate(plan.step_gates, start=1):
        lines.append(f"# step {index}")
        lines += [gate.to_text() for gate in step]
    return "\n".join(lines) + "\n"

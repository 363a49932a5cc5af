"""Fixed-step RK4 integration of the time-dependent Lindblad master equation.

The interaction picture is taken with respect to a diagonal frame Hamiltonian
(frame energies E, rad/us) supplied by the Hamiltonian provider. The state is
stored as rho_I = exp(iEt) rho exp(-iEt); the right-hand side rotates into
the Schroedinger basis, applies -i[V, rho] + D[rho] and rotates back, so jump
operators never need explicit time dependence.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from nemsim.errors import DimensionMismatchError, IntegrationError, NumericInputError
from nemsim.physics.model import SystemOperators
from nemsim.physics.operators import SubsystemLayout
from nemsim.schemas.experiment import Frame, IntegratorConfig
from nemsim.schemas.system import SystemParams, ThermalBathSpec, hz_to_per_us

logger = logging.getLogger(__name__)

RATE_STEP_BOUND = 0.05
_DIAGONAL_TOL = 1e-14

ProgressCallback = Callable[[int, float], None]
StateObserver = Callable[[float, np.ndarray], None]


@dataclass(frozen=True)
class JumpChannel:
    """One dissipator rate * D(operator)."""

    operator: np.ndarray
    rate_per_us: float
    label: str = ""

    def __post_init__(self) -> None:
        if not math.isfinite(self.rate_per_us) or self.rate_per_us < 0:
            raise NumericInputError(f"dissipation rate must be >= 0, got {self.rate_per_us}")


@dataclass(frozen=True)
class LindbladSpec:
    """Collection of jump channels."""

    channels: tuple[JumpChannel, ...] = ()

    def __add__(self, other: "LindbladSpec") -> "LindbladSpec":
        return LindbladSpec(self.channels + other.channels)

    def active(self) -> tuple[JumpChannel, ...]:
        return tuple(c for c in self.channels if c.rate_per_us > 0)

    @property
    def total_rate(self) -> float:
        """Sum of rate * ||L||^2, a bound on the dissipative generator."""
        return sum(
            c.rate_per_us * float(np.linalg.norm(c.operator, 2)) ** 2 for c in self.active()
        )


def thermal_dissipators(
    bath: ThermalBathSpec, b: np.ndarray, omega_mhz: float | None = None, label: str = ""
) -> LindbladSpec:
    """chi (nbar + 1) D(b) + chi nbar D(b+)."""
    nbar = bath.occupation(omega_mhz)
    chi = hz_to_per_us(bath.chi_hz)
    return LindbladSpec(
        (
            JumpChannel(b, chi * (nbar + 1.0), f"{label}thermal_down"),
            JumpChannel(b.conj().T.copy(), chi * nbar, f"{label}thermal_up"),
        )
    )


def system_dissipators(params: SystemParams, layout: SubsystemLayout) -> LindbladSpec:
    """NR decay and dephasing, transmon decay and dephasing, optional thermal bath."""
    ops = SystemOperators.build(layout)
    channels = [
        JumpChannel(ops.b1, hz_to_per_us(params.gamma1_hz), "nr1_decay"),
        JumpChannel(ops.b2, hz_to_per_us(params.gamma2_hz), "nr2_decay"),
        JumpChannel(ops.n1, hz_to_per_us(params.gamma1_dephasing_hz), "nr1_dephasing"),
        JumpChannel(ops.n2, hz_to_per_us(params.gamma2_dephasing_hz), "nr2_dephasing"),
        JumpChannel(ops.sigma_minus, hz_to_per_us(params.gamma_tr_hz), "transmon_decay"),
        JumpChannel(ops.sigma_z, hz_to_per_us(params.gamma_tr_dephasing_hz), "transmon_dephasing"),
    ]
    spec = LindbladSpec(tuple(channels))
    if params.thermal is not None:
        spec = spec + thermal_dissipators(params.thermal, ops.b1, params.omega1_mhz, "nr1_")
        spec = spec + thermal_dissipators(params.thermal, ops.b2, params.omega2_mhz, "nr2_")
    return spec


@runtime_checkable
class HamiltonianProvider(Protocol):
    """Time-dependent Hamiltonian split into a diagonal frame and the rest."""

    @property
    def frame_energies(self) -> np.ndarray: ...

    def perturbation(self, t: float, anchor: float) -> np.ndarray: ...

    def full(self, t: float, anchor: float) -> np.ndarray: ...

    def breakpoints(self) -> list[float]: ...

    def max_frequency(self, frame: Frame) -> float: ...


class StaticHamiltonian:
    """Provider for a fixed matrix or a plain callable H(t)."""

    def __init__(self, h: np.ndarray | Callable[[float], np.ndarray]):
        self._callable = h if callable(h) else None
        self._static = None if callable(h) else np.asarray(h, dtype=complex)
        h0 = self._static if self._static is not None else np.asarray(h(0.0), dtype=complex)
        self._energies = np.real(np.diag(h0)).copy()
        self._h0 = h0

    @property
    def frame_energies(self) -> np.ndarray:
        return self._energies

    def full(self, t: float, anchor: float) -> np.ndarray:
        if self._static is not None:
            return self._static
        return np.asarray(self._callable(t), dtype=complex)

    def perturbation(self, t: float, anchor: float) -> np.ndarray:
        return self.full(t, anchor) - np.diag(self._energies)

    def breakpoints(self) -> list[float]:
        return []

    def max_frequency(self, frame: Frame) -> float:
        if frame is Frame.LAB:
            w = np.linalg.eigvalsh(0.5 * (self._h0 + self._h0.conj().T))
            return float(w[-1] - w[0])
        off_diagonal = np.abs(self._h0 - np.diag(np.diag(self._h0)))
        gaps = np.abs(self._energies[:, None] - self._energies[None, :])
        coupled = float(np.max(gaps[off_diagonal > _DIAGONAL_TOL], initial=0.0))
        return max(coupled, float(np.max(off_diagonal, initial=0.0)))


def as_provider(h) -> HamiltonianProvider:
    if isinstance(h, HamiltonianProvider):
        return h
    return StaticHamiltonian(h)


@dataclass
class Trajectory:
    """Stored density matrices of one integration."""

    times: np.ndarray
    states: np.ndarray
    frame: Frame
    frame_energies: np.ndarray
    step_us: float
    metadata: dict = field(default_factory=dict)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def expect(self, op: np.ndarray) -> np.ndarray:
        """Re Tr(op rho) for every stored sample (and batch member)."""
        return np.real(np.einsum("ab,...ba->...", op, self.states))

    def purity(self) -> np.ndarray:
        return np.real(np.einsum("...ab,...ba->...", self.states, self.states))

    def interaction_picture_states(self) -> np.ndarray:
        if self.frame is Frame.INTERACTION:
            return self.states
        return np.stack(
            [to_interaction_picture(rho, t, self.frame_energies) for t, rho in zip(self.times, self.states)]
        )


def to_interaction_picture(rho: np.ndarray, t: float, energies: np.ndarray) -> np.ndarray:
    """exp(iEt) rho exp(-iEt) for a diagonal frame E."""
    p = np.exp(-1j * np.asarray(energies) * t)
    return p.conj()[:, None] * rho * p[None, :]


def pure_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def _dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def _hermitize(rho: np.ndarray) -> np.ndarray:
    return 0.5 * (rho + _dagger(rho))


class _LindbladRhs:
    """d rho_I / dt with dissipators folded into masks and sandwiches."""

    def __init__(
        self,
        provider: HamiltonianProvider,
        dissipators: LindbladSpec,
        frame: Frame,
        dim: int,
    ):
        self.frame = frame
        self.energies = (
            np.asarray(provider.frame_energies, dtype=float)
            if frame is Frame.INTERACTION
            else np.zeros(dim)
        )
        self.hamiltonian = provider.perturbation if frame is Frame.INTERACTION else provider.full
        self.mask = np.zeros((dim, dim), dtype=complex)
        self.sandwich: list[tuple[float, np.ndarray, np.ndarray]] = []
        self.generic: list[tuple[float, np.ndarray]] = []
        for channel in dissipators.active():
            op = np.asarray(channel.operator, dtype=complex)
            if op.shape != (dim, dim):
                raise DimensionMismatchError(
                    f"jump operator {channel.label or '?'} has shape {op.shape}, expected {(dim, dim)}"
                )
            rate = channel.rate_per_us
            diag = np.diag(op)
            if np.all(np.abs(op - np.diag(diag)) <= _DIAGONAL_TOL):
                self.mask += rate * (
                    diag[:, None] * diag.conj()[None, :]
                    - 0.5 * (np.abs(diag)[:, None] ** 2 + np.abs(diag)[None, :] ** 2)
                )
                continue
            self.sandwich.append((rate, op, op.conj().T.copy()))
            k = op.conj().T @ op
            kd = np.real(np.diag(k))
            if np.all(np.abs(k - np.diag(np.diag(k))) <= _DIAGONAL_TOL):
                self.mask -= 0.5 * rate * (kd[:, None] + kd[None, :])
            else:
                self.generic.append((rate, k))

    def __call__(self, t: float, rho_i: np.ndarray, anchor: float) -> np.ndarray:
        p = np.exp(-1j * self.energies * t)
        rho_s = p[:, None] * rho_i * p.conj()[None, :]
        m = self.hamiltonian(t, anchor) @ rho_s
        out = -1j * (m - _dagger(m)) + self.mask * rho_s
        for rate, op, op_dag in self.sandwich:
            out += rate * (op @ rho_s @ op_dag)
        for rate, k in self.generic:
            out -= 0.5 * rate * (k @ rho_s + rho_s @ k)
        return p.conj()[:, None] * out * p[None, :]


def step_bound(
    provider: HamiltonianProvider, dissipators: LindbladSpec, config: IntegratorConfig
) -> float:
    """Largest RK4 step resolving the fastest oscillation and the total decay rate."""
    bounds = []
    f_max = provider.max_frequency(config.frame)
    if f_max > 0:
        bounds.append(2.0 * math.pi / (config.resolution * f_max))
    total = dissipators.total_rate
    if total > 0:
        bounds.append(RATE_STEP_BOUND / total)
    return min(bounds) if bounds else math.inf


def _choose_step(
    provider: HamiltonianProvider, dissipators: LindbladSpec, config: IntegratorConfig
) -> float:
    bound = step_bound(provider, dissipators, config)
    if config.step_us is None:
        return bound
    if config.step_us > bound:
        logger.warning(
            "explicit step %.3g us exceeds the stability bound %.3g us", config.step_us, bound
        )
    return config.step_us


def _rk4(rhs: _LindbladRhs, t: float, rho: np.ndarray, h: float, anchor: float) -> np.ndarray:
    k1 = rhs(t, rho, anchor)
    k2 = rhs(t + 0.5 * h, rho + 0.5 * h * k1, anchor)
    k3 = rhs(t + 0.5 * h, rho + 0.5 * h * k2, anchor)
    k4 = rhs(t + h, rho + h * k3, anchor)
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def lindblad_evolve(
    hamiltonian,
    dissipators: LindbladSpec,
    rho0: np.ndarray,
    t_grid: Sequence[float],
    config: IntegratorConfig | None = None,
    progress: ProgressCallback | None = None,
    observer: StateObserver | None = None,
) -> Trajectory:
    """Integrate rho from t_grid[0] and store it at the requested times.

    ``hamiltonian`` is a HamiltonianProvider, a matrix or a callable H(t).
    ``rho0`` may be one density matrix (d, d) or a stack (k, d, d). Stored
    samples are Hermitized and in the configured frame. ``observer`` sees
    every grid sample, including those dropped by ``output_stride``.
    """
    config = config or IntegratorConfig()
    provider = as_provider(hamiltonian)
    rho = np.array(rho0, dtype=complex)
    if rho.ndim not in (2, 3) or rho.shape[-1] != rho.shape[-2]:
        raise DimensionMismatchError(f"density matrix stack has shape {rho.shape}")
    dim = rho.shape[-1]
    if not np.all(np.isfinite(rho)):
        raise NumericInputError("initial state has non-finite entries")
    grid = np.asarray(t_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) < 0):
        raise NumericInputError("t_grid must be a non-empty ascending sequence")

    rhs = _LindbladRhs(provider, dissipators, config.frame, dim)
    step = _choose_step(provider, dissipators, config)
    t0, t_end = float(grid[0]), float(grid[-1])
    knots = sorted(
        {float(t) for t in grid}
        | {float(t) for t in provider.breakpoints() if t0 < t < t_end}
    )
    keep = set(range(0, grid.size, config.output_stride)) | {grid.size - 1}
    stored_times: list[float] = []
    stored: list[np.ndarray] = []
    sample = 0
    total_steps = 0

    def store(t: float, state: np.ndarray) -> np.ndarray:
        nonlocal sample
        state = _hermitize(state)
        while sample < grid.size and grid[sample] <= t + 1e-12:
            trace = np.real(np.trace(state, axis1=-2, axis2=-1))
            drift = float(np.max(np.abs(trace - 1.0)))
            logger.debug("t=%.6f us trace=%s", t, trace)
            if drift > config.trace_tolerance:
                raise IntegrationError(
                    f"trace drifted by {drift:.3e} at t={t:.6f} us "
                    f"(step {step:.3e} us, {total_steps} steps)"
                )
            if sample in keep:
                stored_times.append(float(grid[sample]))
                stored.append(state.copy())
            if observer is not None:
                observer(float(grid[sample]), state)
            if progress is not None:
                progress(sample, float(grid[sample]))
            sample += 1
        return state

    rho = store(t0, rho)
    for left, right in zip(knots, knots[1:]):
        span = right - left
        if span <= 0:
            continue
        n = max(1, math.ceil(span / step - 1e-9))
        h = span / n
        anchor = 0.5 * (left + right)
        t = left
        for i in range(n):
            rho = _rk4(rhs, t, rho, h, anchor)
            t = left + (i + 1) * h
        total_steps += n
        if not np.all(np.isfinite(rho)):
            raise IntegrationError(f"state became non-finite before t={right:.6f} us")
        rho = store(right, rho)

    logger.debug("integrated %d RK4 steps of %.3e us", total_steps, step)
    return Trajectory(
        times=np.array(stored_times),
        states=np.array(stored),
        frame=config.frame,
        frame_energies=np.asarray(provider.frame_energies, dtype=float).copy(),
        step_us=step,
        metadata={"steps": total_steps},
    )

"""Fidelities, spin observables and leakage of simulated states."""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from nemsim.errors import DimensionMismatchError, NumericInputError
from nemsim.physics.dynamics import (
    ProgressCallback,
    Trajectory,
    lindblad_evolve,
    pure_density,
    system_dissipators,
)
from nemsim.physics.operators import (
    SubsystemLayout,
    computational_indices,
    computational_state,
    two_qubit_operator,
)
from nemsim.physics.pulses import render_hamiltonian
from nemsim.schemas.experiment import Frame, IntegratorConfig
from nemsim.schemas.pulses import PulseSchedule
from nemsim.schemas.system import SystemParams

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-8
LEAKAGE_SAMPLES = 64

S_Z = 0.5 * (two_qubit_operator("z", "i") + two_qubit_operator("i", "z"))
S_X = 0.5 * (two_qubit_operator("x", "i") + two_qubit_operator("i", "x"))


def fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    """sqrt(<psi|rho|psi>), clamped to [0, 1]."""
    return float(fidelities(rho[None], np.asarray(psi)[None])[0])


def fidelities(rhos: np.ndarray, psis: np.ndarray) -> np.ndarray:
    """Member-wise fidelity of a stack of states against a stack of kets."""
    rhos = np.asarray(rhos, dtype=complex)
    psis = np.asarray(psis, dtype=complex)
    if rhos.shape[-1] != psis.shape[-1] or rhos.shape[:-2] != psis.shape[:-1]:
        raise DimensionMismatchError(f"states {rhos.shape} do not match kets {psis.shape}")
    norms = np.linalg.norm(psis, axis=-1)
    if np.any(np.abs(norms - 1.0) > NORMALIZATION_TOL):
        raise NumericInputError(f"target states are not normalized (norms {norms})")
    overlap = np.real(np.einsum("...a,...ab,...b->...", psis.conj(), rhos, psis))
    return np.sqrt(np.clip(overlap, 0.0, 1.0))


@dataclass(frozen=True)
class FidelityReport:
    """Per-input state fidelities of one gate simulation."""

    labels: tuple[str, ...]
    fidelities: tuple[float, ...]
    descriptor: str = "standard"
    leakage: float = 0.0

    @property
    def mean(self) -> float:
        return float(np.mean(self.fidelities))

    @property
    def min(self) -> float:
        return float(np.min(self.fidelities))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.fidelities))


def standard_input_states() -> list[tuple[str, np.ndarray]]:
    """Nine two-qubit inputs: basis states, single-qubit superpositions, |00> + |11>."""
    r = 1.0 / math.sqrt(2.0)
    states = []
    for index, label in enumerate(("00", "01", "10", "11")):
        amps = np.zeros(4, dtype=complex)
        amps[index] = 1.0
        states.append((label, amps))
    for sign, tag in ((1.0, "+"), (-1.0, "-")):
        states.append((f"{tag}0", np.array([r, 0, sign * r, 0], dtype=complex)))
        states.append((f"0{tag}", np.array([r, sign * r, 0, 0], dtype=complex)))
    states.append(("bell", np.array([r, 0, 0, r], dtype=complex)))
    return states


def computational_block(rho: np.ndarray, layout: SubsystemLayout) -> tuple[np.ndarray, np.ndarray]:
    """Two-qubit block with the transmon traced out and Fock levels >= 2 dropped.

    Returns (renormalized 4x4 states, discarded weight); stacks are supported.
    """
    d1, dt, d2 = layout.dims
    rho = np.asarray(rho, dtype=complex)
    lead = rho.shape[:-2]
    if rho.shape[-2:] != (layout.total_dim, layout.total_dim):
        raise DimensionMismatchError(f"state of shape {rho.shape} does not fit layout {layout.dims}")
    full = rho.reshape(lead + (d1, dt, d2, d1, dt, d2))
    reduced = np.einsum("...aibcid->...abcd", full)[..., :2, :2, :2, :2]
    block = reduced.reshape(lead + (4, 4))
    kept = np.real(np.trace(block, axis1=-2, axis2=-1))
    scale = np.where(kept > 0, kept, 1.0)
    return block / scale[..., None, None], 1.0 - kept


def spin_observables(rho4: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(<S_z>, <S_x>) with S = s_1 + s_2 and spin up = |0>."""
    rho4 = np.asarray(rho4, dtype=complex)
    sz = np.real(np.einsum("ab,...ba->...", S_Z, rho4))
    sx = np.real(np.einsum("ab,...ba->...", S_X, rho4))
    return sz, sx


def leakage(rho: np.ndarray, layout: SubsystemLayout) -> np.ndarray:
    """Population outside the computational subspace."""
    populations = np.real(np.diagonal(np.asarray(rho), axis1=-2, axis2=-1))
    outside = np.ones(layout.total_dim, dtype=bool)
    outside[computational_indices(layout)] = False
    return populations[..., outside].sum(axis=-1)


def leakage_trace(trajectory: Trajectory, layout: SubsystemLayout) -> float:
    """Largest leakage over the stored samples (and batch members)."""
    return float(np.max(leakage(trajectory.states, layout), initial=0.0))


@dataclass
class ObservableTrace:
    """Spin observables and populations along a trajectory."""

    times: np.ndarray
    s_z: np.ndarray
    s_x: np.ndarray
    populations: np.ndarray
    leakage: np.ndarray
    discarded: np.ndarray = field(default_factory=lambda: np.zeros(0))


def observable_trace(trajectory: Trajectory, layout: SubsystemLayout) -> ObservableTrace:
    """Project every sample to the qubit block (interaction frame) and evaluate S_z, S_x."""
    states = trajectory.interaction_picture_states()
    block, discarded = computational_block(states, layout)
    sz, sx = spin_observables(block)
    return ObservableTrace(
        times=np.asarray(trajectory.times),
        s_z=sz,
        s_x=sx,
        populations=np.real(np.diagonal(block, axis1=-2, axis2=-1)),
        leakage=leakage(states, layout),
        discarded=discarded,
    )


def embedded_inputs(
    inputs: Sequence[tuple[str, np.ndarray]], layout: SubsystemLayout
) -> np.ndarray:
    return np.stack([computational_state(amps, layout) for _, amps in inputs])


def gate_fidelity_experiment(
    params: SystemParams,
    schedule: PulseSchedule,
    target: np.ndarray,
    inputs: Sequence[tuple[str, np.ndarray]] | None = None,
    integrator: IntegratorConfig | None = None,
    progress: ProgressCallback | None = None,
    descriptor: str = "standard",
    leakage_samples: int = LEAKAGE_SAMPLES,
) -> FidelityReport:
    """Evolve every input under the full master equation and score against target @ input.

    Leakage is the largest value over ``leakage_samples`` equal intervals of
    the schedule; only the initial and final states are kept in memory.
    """
    if leakage_samples < 1:
        raise NumericInputError(f"leakage_samples must be >= 1, got {leakage_samples}")
    target = np.asarray(target, dtype=complex)
    if target.shape != (4, 4):
        raise DimensionMismatchError(f"target unitary must be 4x4, got {target.shape}")
    inputs = list(inputs) if inputs is not None else standard_input_states()
    layout = SubsystemLayout.hybrid(params.n_max)
    integrator = (integrator or IntegratorConfig()).model_copy(
        update={"output_stride": leakage_samples}
    )
    provider = render_hamiltonian(schedule, params, layout)
    dissipators = system_dissipators(params, layout)
    kets = embedded_inputs(inputs, layout)
    rho0 = np.stack([pure_density(psi) for psi in kets])
    peak = 0.0

    def track_leakage(t: float, state: np.ndarray) -> None:
        nonlocal peak
        peak = max(peak, float(np.max(leakage(state, layout))))

    grid = np.linspace(0.0, schedule.duration_us, leakage_samples + 1)
    trajectory = lindblad_evolve(
        provider, dissipators, rho0, grid, integrator, progress, observer=track_leakage
    )
    final = trajectory.final
    if trajectory.frame is Frame.LAB:
        final = trajectory.interaction_picture_states()[-1]
    targets = embedded_inputs([(label, target @ amps) for label, amps in inputs], layout)
    scores = fidelities(final, targets)
    report = FidelityReport(
        labels=tuple(label for label, _ in inputs),
        fidelities=tuple(float(f) for f in scores),
        descriptor=descriptor,
        leakage=peak,
    )
    logger.debug("gate fidelities %s", report.as_dict())
    return report

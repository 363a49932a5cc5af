"""Hamiltonians of the hybrid system and its closed-form effective quantities.

Inputs are ordinary frequencies in MHz; matrices are returned in rad/us
(2 pi applied here). Reported frequencies (delta, Gamma, lambda) are in MHz.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from nemsim.errors import (
    CalibrationError,
    ConvergenceError,
    DomainError,
    EigendecompositionError,
    InvalidDimensionError,
)
from nemsim.physics.operators import (
    NR1,
    NR2,
    TRANSMON,
    TRANSMON_EXCITED,
    TRANSMON_GROUND,
    SubsystemLayout,
    annihilation_operator,
    basis_index,
    embed,
    number_operator,
    pauli,
)
from nemsim.schemas.system import (
    TWO_PI,
    EffectiveParams,
    NonlinearityKind,
    NonlinearityModel,
    RabiParams,
    SystemParams,
)

logger = logging.getLogger(__name__)

DEFAULT_SHIFT_CUTOFF = 10
RABI_CUTOFF_STEP = 5
RABI_MAX_CUTOFF = 80


@dataclass(frozen=True)
class SystemOperators:
    """Full-space operators of the (NR1, transmon, NR2) layout."""

    layout: SubsystemLayout
    b1: np.ndarray
    b2: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    sigma_x: np.ndarray
    sigma_z: np.ndarray
    sigma_minus: np.ndarray

    @classmethod
    def build(cls, layout: SubsystemLayout) -> "SystemOperators":
        d1, d2 = layout.dim(NR1), layout.dim(NR2)
        return cls(
            layout=layout,
            b1=embed(annihilation_operator(d1), NR1, layout),
            b2=embed(annihilation_operator(d2), NR2, layout),
            n1=embed(number_operator(d1), NR1, layout),
            n2=embed(number_operator(d2), NR2, layout),
            sigma_x=embed(pauli("x"), TRANSMON, layout),
            sigma_z=embed(pauli("z"), TRANSMON, layout),
            sigma_minus=embed(pauli("-"), TRANSMON, layout),
        )

    def b(self, qubit: int) -> np.ndarray:
        return self.b1 if qubit == 1 else self.b2

    def n(self, qubit: int) -> np.ndarray:
        return self.n1 if qubit == 1 else self.n2

    def position(self, qubit: int) -> np.ndarray:
        b = self.b(qubit)
        return b + b.conj().T


@dataclass(frozen=True)
class SpectrumReport:
    """Dressed-level summary of a single nonlinear mode or NR-SC pair."""

    eigenvalues_mhz: np.ndarray
    delta_mhz: float
    populations: np.ndarray
    leakage: np.ndarray
    matrix_elements: np.ndarray
    eigenvector_fidelities: np.ndarray
    n_max: int
    strength_mhz: float | None = None
    extra: dict = field(default_factory=dict)


def nonlinearity_hamiltonian(model: NonlinearityModel, dim: int) -> np.ndarray:
    """beta n(n - 1) or U (b + b+)^4 on a mode of dimension dim (rad/us)."""
    if model.kind is NonlinearityKind.KERR:
        n = np.arange(dim, dtype=float)
        return TWO_PI * model.strength_mhz * np.diag(n * (n - 1)).astype(complex)
    # build in a padded space so the kept block holds exact matrix elements
    b = annihilation_operator(dim + 4)
    x = b + b.conj().T
    x4 = np.linalg.matrix_power(x, 4)[:dim, :dim]
    return TWO_PI * model.strength_mhz * x4


def mode_hamiltonian(model: NonlinearityModel, omega_mhz: float, dim: int) -> np.ndarray:
    return TWO_PI * omega_mhz * number_operator(dim) + nonlinearity_hamiltonian(model, dim)


def build_full_hamiltonian(params: SystemParams, layout: SubsystemLayout) -> np.ndarray:
    """H0 + H_int without any rotating-wave approximation (rad/us)."""
    if layout.dims != (params.n_max + 1, 2, params.n_max + 1):
        raise InvalidDimensionError(
            f"layout {layout.dims} does not match n_max={params.n_max}"
        )
    ops = SystemOperators.build(layout)
    h = TWO_PI * 0.5 * params.transmon_mhz * ops.sigma_z
    for qubit, name in ((1, NR1), (2, NR2)):
        dim = layout.dim(name)
        h = h + embed(
            mode_hamiltonian(params.nonlinearity(qubit), params.omega_mhz(qubit), dim),
            name,
            layout,
        )
        h = h + TWO_PI * params.g_mhz(qubit) * ops.position(qubit) @ ops.sigma_x
    return 0.5 * (h + h.conj().T)


def _sorted_eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise EigendecompositionError(f"eigendecomposition failed: {exc}") from exc
    return w, v


def nonlinear_shift(
    model: NonlinearityModel, omega_mhz: float, n_max: int = DEFAULT_SHIFT_CUTOFF
) -> float:
    """delta = omega_21 - omega_10 of omega b+b + H_nl, in MHz."""
    if n_max < 3:
        raise InvalidDimensionError(f"nonlinear shift needs n_max >= 3, got {n_max}")
    w, _ = _sorted_eigh(mode_hamiltonian(model, omega_mhz, n_max + 1))
    return float((w[2] - 2.0 * w[1] + w[0]) / TWO_PI)


def calibrate_quartic(
    omega_mhz: float,
    target_delta_mhz: float,
    n_max: int = DEFAULT_SHIFT_CUTOFF,
    rtol: float = 1e-6,
) -> float:
    """Quartic strength U (MHz) whose exact delta equals the target."""
    if target_delta_mhz <= 0:
        raise CalibrationError("target shift must be positive")
    upper = 0.1 * omega_mhz

    def mismatch(u: float) -> float:
        return nonlinear_shift(NonlinearityModel.quartic(u), omega_mhz, n_max) - target_delta_mhz

    if mismatch(upper) < 0:
        raise CalibrationError(
            f"no quartic strength in [0, {upper:g}] MHz reaches delta={target_delta_mhz:g} MHz"
        )
    return float(bisect(mismatch, 0.0, upper, rtol=rtol, xtol=1e-12))


def _fix_phases(v: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Make each column's overlap with its reference basis index real positive."""
    v = v.copy()
    for col, row in enumerate(reference):
        amp = v[row, col]
        if abs(amp) > 0:
            v[:, col] *= abs(amp) / amp
    return v


def dressed_basis_report(
    model: NonlinearityModel,
    omega_mhz: float,
    n_max: int = DEFAULT_SHIFT_CUTOFF,
    target_delta_mhz: float | None = None,
) -> SpectrumReport:
    """Eigenvector fidelities and X_kl of the quartic model at matched delta.

    A diagonal-Kerr model sets the target to its exact gap 2 beta; a quartic
    model is used as given unless a target is passed.
    """
    if model.kind is NonlinearityKind.KERR:
        target_delta_mhz = target_delta_mhz or 2.0 * model.strength_mhz
    if target_delta_mhz is not None:
        u = calibrate_quartic(omega_mhz, target_delta_mhz, n_max) if target_delta_mhz > 0 else 0.0
    else:
        u = model.strength_mhz
    dim = n_max + 1
    w, v = _sorted_eigh(mode_hamiltonian(NonlinearityModel.quartic(u), omega_mhz, dim))
    v = _fix_phases(v, range(dim))
    levels = 3
    fidelities = np.abs(np.array([v[n, n] for n in range(levels)]))
    b = annihilation_operator(dim)
    x_kl = (v[:, :levels].conj().T @ b @ v[:, :levels]).real
    logger.debug("quartic U=%.6g MHz for omega=%.6g MHz", u, omega_mhz)
    return SpectrumReport(
        eigenvalues_mhz=w / TWO_PI,
        delta_mhz=float((w[2] - 2 * w[1] + w[0]) / TWO_PI),
        populations=fidelities**2,
        leakage=np.zeros(levels),
        matrix_elements=x_kl,
        eigenvector_fidelities=fidelities,
        n_max=n_max,
        strength_mhz=u,
    )


def best_matching_delta(
    omega_mhz: float,
    reference_fidelities: tuple[float, ...],
    n_max: int = DEFAULT_SHIFT_CUTOFF,
    deltas_mhz: np.ndarray | None = None,
) -> tuple[float, SpectrumReport]:
    """Calibration target whose eigenvector fidelities lie closest to a reference.

    Searches 1..10 MHz by default; the score is the largest absolute deviation
    over the given levels.
    """
    if deltas_mhz is None:
        deltas_mhz = np.linspace(1.0, 10.0, 91)
    reference = np.asarray(reference_fidelities, dtype=float)
    quartic = NonlinearityModel.quartic(0.0)
    best: tuple[float, float, SpectrumReport] | None = None
    for delta in deltas_mhz:
        report = dressed_basis_report(quartic, omega_mhz, n_max, target_delta_mhz=float(delta))
        score = float(np.max(np.abs(report.eigenvector_fidelities[: reference.size] - reference)))
        if best is None or score < best[0]:
            best = (score, float(delta), report)
    if best is None:
        raise CalibrationError("no calibration targets to search")
    logger.info("best delta %.3f MHz at %.6g MHz (deviation %.2e)", best[1], omega_mhz, best[0])
    return best[1], best[2]


def rabi_hamiltonian(params: RabiParams, n_max: int) -> tuple[np.ndarray, SubsystemLayout]:
    """omega b+b + (Omega / 2) sigma_z + g (b + b+) sigma_x on (NR, SC)."""
    layout = SubsystemLayout(names=("nr", "sc"), dims=(n_max + 1, 2))
    b = embed(annihilation_operator(n_max + 1), "nr", layout)
    h = (
        TWO_PI * params.omega_nr_mhz * (b.conj().T @ b)
        + TWO_PI * 0.5 * params.omega_sc_mhz * embed(pauli("z"), "sc", layout)
        + TWO_PI * params.g_mhz * (b + b.conj().T) @ embed(pauli("x"), "sc", layout)
    )
    return h, layout


def _label_states(v: np.ndarray, targets: list[int]) -> list[int]:
    """Eigenvector column with the largest weight on each target basis index."""
    chosen: list[int] = []
    for row in targets:
        order = np.argsort(-np.abs(v[row, :]) ** 2)
        column = next(int(c) for c in order if c not in chosen)
        chosen.append(column)
    return chosen


def rabi_levels(
    params: RabiParams, n_max: int
) -> tuple[np.ndarray, np.ndarray, list[int], SubsystemLayout]:
    """Eigenpairs (rad/us) and the columns of the dressed |n, down> states, n = 0, 1, 2."""
    h, layout = rabi_hamiltonian(params, n_max)
    w, v = _sorted_eigh(h)
    targets = [basis_index(layout, {"nr": n, "sc": TRANSMON_GROUND}) for n in range(3)]
    return w, v, _label_states(v, targets), layout


def rabi_spectrum(
    params: RabiParams,
    n_max: int = 10,
    max_n_max: int = RABI_MAX_CUTOFF,
    rtol: float = 0.01,
) -> SpectrumReport:
    """Exact Rabi-model spectrum, delta converged in the Fock cutoff."""
    if n_max < 3:
        raise InvalidDimensionError(f"rabi spectrum needs n_max >= 3, got {n_max}")

    def delta_at(cutoff: int) -> float:
        w, _, cols, _ = rabi_levels(params, cutoff)
        e = w[cols]
        return float((e[2] - 2 * e[1] + e[0]) / TWO_PI)

    current = delta_at(n_max)
    while True:
        if n_max + RABI_CUTOFF_STEP > max_n_max:
            raise ConvergenceError(
                f"rabi delta not converged to {rtol:.0%} below n_max={max_n_max}"
            )
        refined = delta_at(n_max + RABI_CUTOFF_STEP)
        if abs(refined - current) <= rtol * abs(refined) or abs(refined - current) < 1e-12:
            break
        n_max += RABI_CUTOFF_STEP
        current = refined

    w, v, cols, layout = rabi_levels(params, n_max)
    targets = [basis_index(layout, {"nr": n, "sc": TRANSMON_GROUND}) for n in range(3)]
    dressed = v[:, cols]
    populations = np.array([abs(dressed[t, k]) ** 2 for k, t in enumerate(targets)])
    excited = [
        basis_index(layout, {"nr": n, "sc": TRANSMON_EXCITED}) for n in range(layout.dims[0])
    ]
    leakage = np.sum(np.abs(dressed[excited, :]) ** 2, axis=0)
    dressed = _fix_phases(dressed, targets)
    b = embed(annihilation_operator(n_max + 1), "nr", layout)
    e = w[cols]
    return SpectrumReport(
        eigenvalues_mhz=w / TWO_PI,
        delta_mhz=float((e[2] - 2 * e[1] + e[0]) / TWO_PI),
        populations=populations,
        leakage=leakage,
        matrix_elements=(dressed.conj().T @ b @ dressed).real,
        eigenvector_fidelities=np.sqrt(populations),
        n_max=n_max,
    )


def perturbative_delta(params: RabiParams) -> float:
    """Fourth-order nonlinear shift of the NR induced by the SC element (MHz)."""
    omega, big = params.omega_nr_mhz, params.omega_sc_mhz
    if big == omega:
        raise DomainError("perturbative shift diverges at Omega == omega")
    g4 = params.g_mhz**4
    minus, plus = big - omega, big + omega
    bracket = (
        2.0 / (minus**2 * plus)
        + 2.0 / (plus**2 * minus)
        + 1.0 / plus**3
        + 1.0 / minus**3
    )
    return 2.0 * g4 * bracket


def effective_params(
    params: SystemParams,
    omega1_mhz: float | None = None,
    omega2_mhz: float | None = None,
    transmon_mhz: float | None = None,
) -> EffectiveParams:
    """Gamma and lambda_i of the second-order effective XY Hamiltonian.

    NR and transmon frequencies default to the idle values of ``params``.
    """
    w1 = params.omega1_mhz if omega1_mhz is None else omega1_mhz
    w2 = params.omega2_mhz if omega2_mhz is None else omega2_mhz
    big = params.transmon_mhz if transmon_mhz is None else transmon_mhz
    for w in (w1, w2):
        if big * big == w * w:
            raise DomainError(f"transmon at {big:g} MHz resonant with NR at {w:g} MHz")
    g1, g2 = params.g1_mhz, params.g2_mhz
    gamma = (
        4.0 * g1 * g2 * big * (w1**2 + w2**2 - 2.0 * big**2)
        / ((big**2 - w1**2) * (big**2 - w2**2))
    )

    def shift(g: float, w: float, beta: float) -> float:
        return (
            -2.0 * g**2 * (big**2 + w * (2.0 * beta + big))
            / ((2.0 * beta + big + w) * (big**2 - w**2))
        )

    return EffectiveParams(
        gamma_mhz=gamma,
        lambda1_mhz=shift(g1, w1, params.beta1_mhz),
        lambda2_mhz=shift(g2, w2, params.beta2_mhz),
    )


def compensation_shifts(
    params: SystemParams,
    transmon_mhz: float | None = None,
    omega1_mhz: float | None = None,
    omega2_mhz: float | None = None,
) -> tuple[float, float]:
    """Permanent offsets (-lambda_1, -lambda_2) in MHz."""
    eff = effective_params(params, omega1_mhz, omega2_mhz, transmon_mhz)
    return (-eff.lambda1_mhz, -eff.lambda2_mhz)


def _with_frequencies(params: SystemParams, **updates: float) -> SystemParams:
    return params.model_copy(update=updates)


def exchange_splitting(params: SystemParams, common_mhz: float | None = None) -> float:
    """Splitting (MHz) of the dressed |10>, |01> pair with both NRs at one frequency."""
    common = 0.5 * (params.omega1_mhz + params.omega2_mhz) if common_mhz is None else common_mhz
    tuned = _with_frequencies(params, omega1_mhz=common, omega2_mhz=common)
    layout = SubsystemLayout.hybrid(tuned.n_max)
    w, v = _sorted_eigh(build_full_hamiltonian(tuned, layout))
    rows = [
        basis_index(layout, {NR1: 1, TRANSMON: TRANSMON_GROUND, NR2: 0}),
        basis_index(layout, {NR1: 0, TRANSMON: TRANSMON_GROUND, NR2: 1}),
    ]
    weight = np.sum(np.abs(v[rows, :]) ** 2, axis=0)
    pair = np.argsort(-weight)[:2]
    return float(abs(w[pair[0]] - w[pair[1]]) / TWO_PI)


def dressed_transition_frequency(
    params: SystemParams, qubit: int, compensated: bool = False
) -> float:
    """Dressed |1>-|0> transition of one NR (other NR in vacuum), in MHz."""
    layout = SubsystemLayout.hybrid(params.n_max)
    h = build_full_hamiltonian(params, layout)
    if compensated:
        ops = SystemOperators.build(layout)
        shifts = compensation_shifts(params)
        h = h + TWO_PI * (shifts[0] * ops.n1 + shifts[1] * ops.n2)
    w, v = _sorted_eigh(h)
    excited = {NR1: 1} if qubit == 1 else {NR2: 1}
    targets = [
        basis_index(layout, {TRANSMON: TRANSMON_GROUND}),
        basis_index(layout, {TRANSMON: TRANSMON_GROUND, **excited}),
    ]
    ground, one = _label_states(v, targets)
    return float((w[one] - w[ground]) / TWO_PI)


def ground_state_overlap(params: SystemParams) -> float:
    """Probability of |0, down, 0> in the full-model ground state."""
    layout = SubsystemLayout.hybrid(params.n_max)
    _, v = _sorted_eigh(build_full_hamiltonian(params, layout))
    return float(abs(v[basis_index(layout, {TRANSMON: TRANSMON_GROUND}), 0]) ** 2)

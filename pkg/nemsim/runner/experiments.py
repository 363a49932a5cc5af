"""Per-point functions of the registry experiments.

Each function takes the effective ExperimentConfig (knobs already merged
with the registry defaults) and one sweep point, and returns table rows.
They are module-level so worker processes can unpickle them.
"""

import logging
import math

import numpy as np

from nemsim.errors import ConfigError
from nemsim.physics.analysis import (
    FidelityReport,
    computational_block,
    embedded_inputs,
    fidelities,
    gate_fidelity_experiment,
    leakage,
    spin_observables,
)
from nemsim.physics.compiler import (
    compile_step,
    count_windows,
    map_spin1,
    sequence_unitary,
    spin_hamiltonian_matrix,
    tim_spec,
    trotterize,
)
from nemsim.physics.dynamics import Trajectory, lindblad_evolve, pure_density, system_dissipators
from nemsim.physics.model import (
    dressed_basis_report,
    nonlinear_shift,
    perturbative_delta,
    rabi_hamiltonian,
    rabi_levels,
    rabi_spectrum,
)
from nemsim.physics.operators import (
    SubsystemLayout,
    annihilation_operator,
    computational_state,
    embed,
    matrix_exponential,
    pauli,
)
from nemsim.physics.pulses import ScheduleBuilder, render_hamiltonian, schedule_gates, xy_timing
from nemsim.physics.redfield import NoiseCoupling, bloch_redfield_evolve, extract_decay_time
from nemsim.progress.events import capture_trotter_step
from nemsim.runner.overrides import is_system_axis, with_overrides
from nemsim.schemas.experiment import ExperimentConfig, IntegratorConfig
from nemsim.schemas.pulses import EnvelopeKind, GateSpec, PulseOptions, PulseSchedule
from nemsim.schemas.spin import SpinHamiltonianSpec
from nemsim.schemas.system import (
    NonlinearityModel,
    RabiParams,
    SystemParams,
    ThermalBathSpec,
    hz_to_per_us,
)

logger = logging.getLogger(__name__)

Row = tuple[float, ...]

FIG2_HEADERS = (
    "g_mhz",
    "delta_mhz",
    "delta_perturbative_mhz",
    "p0",
    "p1",
    "p2",
    "leakage0",
    "leakage1",
    "leakage2",
)
GATE_GRID_HEADERS = (
    "gamma_nr_dephasing_hz",
    "gamma_tr_dephasing_hz",
    "fidelity_mean",
    "fidelity_min",
    "leakage_max",
)
FIG4_HEADERS = (
    "delta_mhz",
    "fidelity_gaussian",
    "leakage_gaussian",
    "fidelity_square",
    "leakage_square",
)
FIG5A_HEADERS = (
    "gamma_nr_dephasing_hz",
    "sample",
    "time_us",
    "physical_time_us",
    "s_z",
    "s_z_exact",
    "fidelity",
    "leakage",
)
FIG5B_HEADERS = (
    "gamma_nr_dephasing_hz",
    "step",
    "time_us",
    "physical_time_us",
    "s_x",
    "s_x_trotter",
    "s_x_exact",
    "fidelity",
    "leakage",
    "two_qubit_windows",
    "single_qubit_windows",
)
FIG6_HEADERS = ("u_mhz", "u_over_omega", "delta_quartic_mhz", "delta_diagonal_mhz")
FIG7_HEADERS = ("g_mhz", "t1_ms", "t2_ms", "t1_ratio", "t2_ratio")
TABLEA_HEADERS = (
    "omega_mhz",
    "u_mhz",
    "delta_mhz",
    "fidelity0",
    "fidelity1",
    "fidelity2",
    "x01",
    "x12",
)
THERMAL_HEADERS = ("chi_hz", "nbar", "fidelity_mean", "fidelity_min", "delta_fidelity_mean")


def _integrator(cfg: ExperimentConfig) -> IntegratorConfig:
    return cfg.integrator.relaxed() if cfg.fast else cfg.integrator


def _system(cfg: ExperimentConfig, point: dict[str, float]) -> SystemParams:
    updates = {k: v for k, v in point.items() if is_system_axis(k)}
    return with_overrides(cfg.system, updates) if updates else cfg.system


def _gamma_sign(params: SystemParams, options: PulseOptions) -> int:
    return 1 if xy_timing(params, options).gamma_mhz > 0 else -1


def _gate_report(
    cfg: ExperimentConfig,
    params: SystemParams,
    gates: list[GateSpec],
    options: PulseOptions | None = None,
) -> FidelityReport:
    options = options or cfg.pulse
    sign = -1 if all(g.is_rotation for g in gates) else _gamma_sign(params, options)
    schedule = schedule_gates(gates, params, options)
    return gate_fidelity_experiment(
        params, schedule, sequence_unitary(gates, sign), integrator=_integrator(cfg)
    )


def fig2_point(cfg: ExperimentConfig, point: dict[str, float]) -> list[Row]:
    rabi = RabiParams(
        omega_nr_mhz=cfg.knobs["omega_nr_mhz"],
        omega_sc_mhz=cfg.knobs["omega_sc_mhz"],
        g_mhz=point["g_mhz"],
    )
    report = rabi_spectrum(rabi)
    return [
        (
            point["g_mhz"],
            report.delta_mhz,
            perturbative_delta(rabi),
            *(float(p) for p in report.populations[:3]),
            *(float(p) for p in report.leakage[:3]),
        )
    ]


def _grid_row(point: dict[str, float], report: FidelityReport) -> Row:
    return (
        point["gamma_nr_dephasing_hz"],
        point["gamma_tr_dephasing_hz"],
        report.mean,
        report.min,
        report.leakage,
    )


def fig3a_point(cfg: ExperimentConfig, point: dict[str, float]) -> list[Row]:
    params = _system(cfg, point)
    return [_grid_row(point, _gate_report(cfg, params, [GateSpec.rx(1, math.pi / 2)]))]


def fig3b_point(cfg: ExperimentConfig, point: dict[str, float]) -> list[Row]:
    params = _system(cfg, point)
    return [_grid_row(point, _gate_report(cfg, params, [GateSpec.sqrt_iswap()]))]


def fig4_point(cfg: ExperimentConfig, point: dict[str, float]) -> list[Row]:
    delta = point["delta_mhz"]
    params = with_overrides(cfg.system, {"beta_mhz": 0.5 * delta})
    row: list[float] = [delta]
    for envelope in (EnvelopeKind.GAUSSIAN, EnvelopeKind.SQUARE):
        options = cfg.pulse.model_copy(update={"envelope": envelope})
        report = _gate_report(cfg, params, [GateSpec.rx(1, math.pi)], options)
        row += [report.mean, report.leakage]
    return [tuple(row)]


def _run_markers(
    cfg: ExperimentConfig,
    params: SystemParams,
    schedule: PulseSchedule,
    amplitudes: np.ndarray,
    steps: int,
    offset: int = 0,
) -> tuple[Trajectory, SubsystemLayout]:
    """Evolve one input from t = 0 and store it at every schedule marker.

    Marker ``offset + k`` is reported as Trotter step k.
    """
    layout = SubsystemLayout.hybrid(params.n_max)
    provider = render_hamiltonian(schedule, params, layout)
    rho0 = pure_density(computational_state(amplitudes, layout))

    def progress(sample: int, time_us: float) -> None:
        if sample >= offset:
            capture_trotter_step(cfg.experiment, sample - offset, steps, time_us)

    trajectory = lindblad_evolve(
        provider,
        system_dissipators(params, layout),
        rho0,
        list(schedule.markers),
        _integrator(cfg),
        progress,
    )
    return trajectory, layout


def _observables(
    trajectory: Trajectory, layout: SubsystemLayout, targets: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    states = trajectory.interaction_picture_states()
    block, _ = computational_block(states, layout)
    s_z, s_x = spin_observables(block)
    kets = embedded_inputs([("", t) for t in targets], layout)
    return s_z, s_x, fidelities(states, kets), leakage(states, layout)


def fig5a_point(cfg: ExperimentConfig, point: dict[str, float]) -> list[Row]:
    params = _system(cfg, point)
    gamma = xy_timing(params, cfg.pulse).gamma_mhz
    sign = 1 if gamma > 0 else -1
    d, e = cfg.knobs["d_ratio"] * gamma, cfg.knobs["e_ratio"] * gamma
    samples = int(cfg.knobs["samples"])
    if samples < 1:
        raise ConfigError("fig5a needs samples >= 1")
    total = cfg.knobs["time_us"]
    if total <= 0:
        if e == 0:
            raise ConfigError("fig5a needs time_us when e_ratio is 0")
        total = 1.0 / (2.0 * abs(e))
    spec = map_spin1(d, e)
    dt = total / samples
    step = compile_step(spec, dt, sign)
    builder = ScheduleBuilder(params, cfg.pulse).mark()
    for _ in range(samples):
        builder.add_gates(step).mark()
    schedule = builder.build()

    psi0 = np.array([1, 0, 0, 0], dtype=complex)
    h = spin_hamiltonian_matrix(spec)
    times = [k * dt for k in range(samples + 1)]
    exact = np.stack([matrix_exponential(-1j * h * t) @ psi0 for t in times])
    trajectory, layout = _run_markers(cfg, params, schedule, psi0, samples)
    s_z, _, scores, leaks = _observables(trajectory, layout, exact)
    s_z_exact, _ = spin_observables(np.einsum("ka,kb->kab", exact, exact.conj()))
    return [
        (
            point["gamma_nr_dephasing_hz"],
            float(k),
            times[k],
            float(trajectory.times[k]),
            float(s_z[k]),
            float(s_z_exact[k]),
            float(scores[k]),
            float(leaks[k]),
        )
        for k in range(samples + 1)
    ]


def fig5b_spec(cfg: ExperimentConfig, gamma_mhz: float) -> SpinHamiltonianSpec:
    """TIM with Lambda and b scaled from Gamma; the defaults give Lambda = 2b = Gamma."""
    return tim_spec(
        cfg.knobs["coupling_ratio"] * gamma_mhz, cfg.knobs["field_ratio"] * gamma_mhz
    )


def fig5b_point(cfg: ExperimentConfig, point: dict[str, float]) -> list[Row]:
    params = _system(cfg, point)
    gamma = xy_timing(params, cfg.pulse).gamma_mhz
    sign = 1 if gamma > 0 else -1
    steps = int(cfg.knobs["steps"])
    spec = fig5b_spec(cfg, gamma)
    plan = trotterize(spec, cfg.knobs["time_us"], steps, sign)

    # x-polarized start: Ry(pi/2) on both qubits
    builder = ScheduleBuilder(params, cfg.pulse).mark()
    builder.add_gates([GateSpec.ry(1, math.pi / 2), GateSpec.ry(2, math.pi / 2)]).mark()
    for step_gates in plan.step_gates:
        builder.add_gates(step_gates).mark()
    schedule = builder.build()

    plus = np.full(4, 0.5, dtype=complex)
    h = spin_hamiltonian_matrix(spec)
    times = [k * plan.tau_us for k in range(steps + 1)]
    trotter = np.stack([u @ plus for u in plan.prefix_unitaries])
    exact = np.stack([matrix_exponential(-1j * h * t) @ plus for t in times])
    trajectory, layout = _run_markers(
        cfg, params, schedule, np.array([1, 0, 0, 0], dtype=complex), steps, offset=1
    )
    _, s_x, scores, leaks = _observables(trajectory, layout, np.vstack([plus[None], trotter]))
    _, s_x_trotter = spin_observables(np.einsum("ka,kb->kab", trotter, trotter.conj()))
    _, s_x_exact = spin_observables(np.einsum("ka,kb->kab", exact, exact.conj()))
    per_step = len(plan.step_gates[0]) if plan.step_gates else 0
    rows = []
    for k in range(steps + 1):
        windows = count_windows(plan.gates[: k * per_step])
        rows.append(
            (
                point["gamma_nr_dephasing_hz"],
                float(k),
                times[k],
                float(trajectory.times[k + 1]),
                float(s_x[k + 1]),
                float(s_x_trotter[k]),
                float(s_x_exact[k]),
                float(scores[k + 1]),
                float(leaks[k + 1]),
                float(windows.two_qubit),
                float(windows.single_qubit),
            )
        )
    logger.info(
        "fig5b: %d steps, %.1f us of pulses, %d + %d windows",
        steps,
        schedule.duration_us,
        int(rows[-1][-2]),
        int(rows[-1][-1]),
    )
    return rows


def fig6_point(cfg: ExperimentConfig, point: dict[str, float]) -> list[Row]:
    u = point["u_mhz"]
    omega = cfg.knobs["omega_mhz"]
    n_max = int(cfg.knobs["n_max"])
    return [
        (
            u,
            u / omega,
            nonlinear_shift(NonlinearityModel.quartic(u), omega, n_max),
            nonlinear_shift(NonlinearityModel.kerr(u), omega, n_max),
        )
    ]


def fig7_point(cfg: ExperimentConfig, point: dict[str, float]) -> list[Row]:
    knobs = cfg.knobs
    rabi = RabiParams(
        omega_nr_mhz=knobs["omega_nr_mhz"],
        omega_sc_mhz=knobs["omega_sc_mhz"],
        g_mhz=point["g_mhz"],
    )
    n_max = int(knobs["n_max"])
    h, layout = rabi_hamiltonian(rabi, n_max)
    _, v, cols, _ = rabi_levels(rabi, n_max)
    ground, one = v[:, cols[0]], v[:, cols[1]]
    b = embed(annihilation_operator(n_max + 1), "nr", layout)
    couplings = [
        NoiseCoupling(b + b.conj().T, hz_to_per_us(knobs["gamma_nr_hz"]), 0.0, "nr_x"),
        NoiseCoupling(b.conj().T @ b, 0.0, hz_to_per_us(knobs["gamma_nr_dephasing_hz"]), "nr_n"),
        NoiseCoupling(embed(pauli("x"), "sc", layout), hz_to_per_us(knobs["gamma_sc_hz"]), 0.0, "sc_x"),
        NoiseCoupling(
            embed(pauli("z"), "sc", layout), 0.0, hz_to_per_us(knobs["gamma_sc_dephasing_hz"]), "sc_z"
        ),
    ]
    times = np.linspace(0.0, 1e3 * knobs["t_max_ms"], int(knobs["samples"]))

    relax = bloch_redfield_evolve(h, couplings, np.outer(one, one.conj()), times)
    population = np.real(np.einsum("a,tab,b->t", one.conj(), relax.states, one))
    plus = (ground + one) / math.sqrt(2.0)
    dephase = bloch_redfield_evolve(h, couplings, np.outer(plus, plus.conj()), times)
    coherence = 2.0 * np.abs(np.einsum("a,tab,b->t", ground.conj(), dephase.states, one))

    t1_ms = extract_decay_time(times, population) / 1e3
    t2_ms = extract_decay_time(times, coherence) / 1e3
    gamma, gamma_d = knobs["gamma_nr_hz"], knobs["gamma_nr_dephasing_hz"]
    t1_bare = 1e3 / gamma
    t2_bare = 1e3 / (0.5 * gamma + 0.5 * gamma_d)
    return [(point["g_mhz"], t1_ms, t2_ms, t1_ms / t1_bare, t2_ms / t2_bare)]


def table_a_point(cfg: ExperimentConfig, point: dict[str, float]) -> list[Row]:
    omega = point["omega_mhz"]
    # delta_mhz = 0 calibrates to the diagonal-model gap 2 beta
    report = dressed_basis_report(
        NonlinearityModel.kerr(cfg.knobs["beta_mhz"]),
        omega,
        int(cfg.knobs["n_max"]),
        target_delta_mhz=cfg.knobs["delta_mhz"] or None,
    )
    fid = report.eigenvector_fidelities
    x = report.matrix_elements
    return [
        (
            omega,
            float(report.strength_mhz or 0.0),
            report.delta_mhz,
            float(fid[0]),
            float(fid[1]),
            float(fid[2]),
            float(x[0, 1]),
            float(x[1, 2]),
        )
    ]


def thermal_point(cfg: ExperimentConfig, point: dict[str, float]) -> list[Row]:
    chi = point["chi_hz"]
    nbar = cfg.knobs["nbar"]
    bath = ThermalBathSpec(chi_hz=chi, nbar=nbar) if chi > 0 else None
    params = cfg.system.model_copy(update={"thermal": bath})
    report = _gate_report(cfg, params, [GateSpec.rx(1, math.pi / 2)])
    return [(chi, nbar, report.mean, report.min)]


def thermal_finalize(cfg: ExperimentConfig, rows: list[Row]) -> list[Row]:
    """Append the mean-fidelity change relative to the bath-free run."""
    baseline = next((row[2] for row in rows if row[0] == 0.0), None)
    if baseline is None:
        baseline = thermal_point(cfg, {"chi_hz": 0.0})[0][2]
    return [(*row, row[2] - baseline) for row in rows]

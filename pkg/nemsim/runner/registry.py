"""Registry of reproducible experiments."""

from collections.abc import Callable
from dataclasses import dataclass, field

from nemsim.errors import UnknownExperimentError
from nemsim.runner import experiments as ex

PointFunction = Callable[..., list[tuple[float, ...]]]


@dataclass(frozen=True)
class SweepAxis:
    """One sweep axis with its full and --fast value grids."""

    name: str
    values: tuple[float, ...]
    fast_values: tuple[float, ...]


@dataclass(frozen=True)
class ExperimentEntry:
    """A named experiment: sweep axes, knobs and the per-point function."""

    name: str
    title: str
    description: str
    headers: tuple[str, ...]
    axes: tuple[SweepAxis, ...]
    point: PointFunction
    knobs: dict[str, float] = field(default_factory=dict)
    finalize: Callable | None = None
    slow: bool = False

    @property
    def axis_names(self) -> tuple[str, ...]:
        return tuple(axis.name for axis in self.axes)


def _log_grid(low: float, high: float, count: int) -> tuple[float, ...]:
    if count == 1:
        return (low,)
    ratio = (high / low) ** (1.0 / (count - 1))
    return tuple(float(f"{low * ratio**i:.6g}") for i in range(count))


_NR_DEPHASING = SweepAxis("gamma_nr_dephasing_hz", _log_grid(10.0, 1e5, 8), _log_grid(10.0, 1e5, 3))
_TR_DEPHASING = SweepAxis("gamma_tr_dephasing_hz", _log_grid(1e4, 1e6, 8), _log_grid(1e4, 1e6, 3))

CATALOG: dict[str, ExperimentEntry] = {
    "fig2": ExperimentEntry(
        name="fig2",
        title="NR-SC nonlinear shift and leakage",
        description="Exact Rabi-model shift delta, bare-state weights and SC excitation vs g",
        headers=ex.FIG2_HEADERS,
        axes=(
            SweepAxis(
                "g_mhz",
                tuple(float(g) for g in range(0, 55, 5)),
                (0.0, 25.0, 50.0),
            ),
        ),
        point=ex.fig2_point,
        knobs={"omega_nr_mhz": 100.0, "omega_sc_mhz": 500.0},
    ),
    "fig3a": ExperimentEntry(
        name="fig3a",
        title="Rx(pi/2) fidelity vs dephasing",
        description="Mean and minimum input-state fidelity of Rx(pi/2) on NR1 over NR and transmon dephasing",
        headers=ex.GATE_GRID_HEADERS,
        axes=(_NR_DEPHASING, _TR_DEPHASING),
        point=ex.fig3a_point,
        slow=True,
    ),
    "fig3b": ExperimentEntry(
        name="fig3b",
        title="sqrt(iSWAP) fidelity vs dephasing",
        description="Mean and minimum input-state fidelity of the XY entangling gate over NR and transmon dephasing",
        headers=ex.GATE_GRID_HEADERS,
        axes=(_NR_DEPHASING, _TR_DEPHASING),
        point=ex.fig3b_point,
        slow=True,
    ),
    "fig4": ExperimentEntry(
        name="fig4",
        title="Rx(pi) fidelity vs nonlinear shift",
        description="Gaussian and square Rx(pi) fidelity and leakage vs the NR shift delta = 2 beta",
        headers=ex.FIG4_HEADERS,
        axes=(
            SweepAxis(
                "delta_mhz",
                (0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0),
                (0.5, 2.0, 6.0),
            ),
        ),
        point=ex.fig4_point,
        slow=True,
    ),
    "fig5a": ExperimentEntry(
        name="fig5a",
        title="Spin-1 digital simulation",
        description="<S_z> of the spin-1 model encoded in two NR qubits vs simulated time",
        headers=ex.FIG5A_HEADERS,
        axes=(SweepAxis("gamma_nr_dephasing_hz", (0.0, 1000.0), (0.0, 1000.0)),),
        point=ex.fig5a_point,
        knobs={"d_ratio": 1.0, "e_ratio": 0.5, "samples": 10.0, "time_us": 0.0},
        slow=True,
    ),
    "fig5b": ExperimentEntry(
        name="fig5b",
        title="Transverse-field Ising digital simulation",
        description="<S_x> of the two-spin TIM under first-order Trotterization vs simulated time",
        headers=ex.FIG5B_HEADERS,
        axes=(SweepAxis("gamma_nr_dephasing_hz", (100.0, 1000.0), (100.0, 1000.0)),),
        point=ex.fig5b_point,
        knobs={"steps": 10.0, "time_us": 25.0, "coupling_ratio": 1.0, "field_ratio": 0.5},
        slow=True,
    ),
    "fig6": ExperimentEntry(
        name="fig6",
        title="Quartic vs diagonal nonlinearity",
        description="Exact shift delta of U (b + b+)^4 and of U b+b+bb vs U",
        headers=ex.FIG6_HEADERS,
        axes=(
            SweepAxis(
                "u_mhz",
                tuple(0.5 + i for i in range(9)),
                (0.5, 4.5, 8.5),
            ),
        ),
        point=ex.fig6_point,
        knobs={"omega_mhz": 85.0, "n_max": 10.0},
    ),
    "fig7": ExperimentEntry(
        name="fig7",
        title="Bloch-Redfield T1 and T2 vs g",
        description="Dressed NR relaxation and coherence times of the NR-SC pair vs coupling",
        headers=ex.FIG7_HEADERS,
        axes=(
            SweepAxis(
                "g_mhz",
                (0.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0),
                (0.0, 25.0, 50.0),
            ),
        ),
        point=ex.fig7_point,
        knobs={
            "omega_nr_mhz": 100.0,
            "omega_sc_mhz": 500.0,
            "gamma_nr_hz": 50.0,
            "gamma_nr_dephasing_hz": 200.0,
            "gamma_sc_hz": 1000.0,
            "gamma_sc_dephasing_hz": 50000.0,
            "n_max": 6.0,
            "t_max_ms": 60.0,
            "samples": 241.0,
        },
    ),
    "tableA": ExperimentEntry(
        name="tableA",
        title="Quartic-model eigenvectors and matrix elements",
        description="Eigenvector fidelities |<n|n~>| and X_kl = <k|b|l> at delta-matched quartic strength",
        headers=ex.TABLEA_HEADERS,
        axes=(SweepAxis("omega_mhz", (75.0, 85.0), (75.0, 85.0)),),
        point=ex.table_a_point,
        knobs={"beta_mhz": 3.0, "delta_mhz": 0.0, "n_max": 10.0},
    ),
    "thermal": ExperimentEntry(
        name="thermal",
        title="Thermal-bath sensitivity",
        description="Rx(pi/2) fidelity with a residual thermal bath on both NRs vs bath coupling chi",
        headers=ex.THERMAL_HEADERS,
        axes=(SweepAxis("chi_hz", (0.0, 50.0, 1000.0), (0.0, 50.0, 1000.0)),),
        point=ex.thermal_point,
        knobs={"nbar": 0.1},
        finalize=ex.thermal_finalize,
        slow=True,
    ),
}


def get_experiment(name: str) -> ExperimentEntry:
    """Get an experiment by name."""
    entry = CATALOG.get(name)
    if entry is None:
        raise UnknownExperimentError(name, sorted(CATALOG))
    return entry


def get_all_experiments() -> dict[str, ExperimentEntry]:
    """Get all experiments."""
    return CATALOG.copy()

"""Bloch-Redfield master equation for a time-independent Hamiltonian.

The tensor is built in the eigenbasis of H with transition frequencies
w_ab = E_a - E_b; a positive frequency is a downward (emissive) transition.
Noise spectra are zero-temperature white noise: gamma_d at zero frequency,
gamma at positive frequencies, nothing at negative ones.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eig, expm, solve

from nemsim.errors import EigendecompositionError, FitError, NumericInputError
from nemsim.physics.dynamics import Trajectory
from nemsim.schemas.experiment import Frame

logger = logging.getLogger(__name__)

SECULAR_FACTOR = 10.0
CONDITION_LIMIT = 1e8
MIN_FIT_SAMPLES = 10


@dataclass(frozen=True)
class NoiseCoupling:
    """Hermitian system operator and its white-noise spectrum (rates in 1/us)."""

    operator: np.ndarray
    rate_positive: float
    rate_zero: float = 0.0
    label: str = ""

    def __post_init__(self) -> None:
        op = np.asarray(self.operator)
        if not np.allclose(op, op.conj().T, atol=1e-12):
            raise NumericInputError(f"noise operator {self.label or '?'} is not Hermitian")
        if self.rate_positive < 0 or self.rate_zero < 0:
            raise NumericInputError("noise rates must be >= 0")

    def spectrum(self, w: np.ndarray, zero_tol: float) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return np.where(
            np.abs(w) <= zero_tol,
            self.rate_zero,
            np.where(w > 0, self.rate_positive, 0.0),
        )

    @property
    def max_rate(self) -> float:
        return max(self.rate_positive, self.rate_zero)


def _eigenbasis(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        return np.linalg.eigh(0.5 * (h + h.conj().T))
    except np.linalg.LinAlgError as exc:
        raise EigendecompositionError(f"Hamiltonian diagonalization failed: {exc}") from exc


def redfield_tensor(
    h: np.ndarray,
    couplings: Sequence[NoiseCoupling],
    secular: bool = True,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Liouvillian (N^2 x N^2, row-major vec) in the eigenbasis of h.

    Returns (liouvillian, energies, eigenvectors).
    """
    energies, vecs = _eigenbasis(np.asarray(h, dtype=complex))
    n = energies.size
    w = energies[:, None] - energies[None, :]
    zero_tol = 1e-9 * max(1.0, float(np.max(np.abs(energies))))
    eye = np.eye(n)
    r = np.zeros((n, n, n, n), dtype=complex)
    for coupling in couplings:
        a = vecs.conj().T @ np.asarray(coupling.operator, dtype=complex) @ vecs
        s = coupling.spectrum(w, zero_tol)
        r += 0.5 * (
            np.einsum("ac,db->abcd", a * s.T, a) + np.einsum("ac,db->abcd", a, a * s)
        )
        left = a @ (a * s.T)  # sum_n A_an A_nc S(w_cn)
        right = (a * s) @ a  # sum_n A_dn A_nb S(w_dn)
        r -= 0.5 * np.einsum("ac,bd->abcd", left, eye)
        r -= 0.5 * np.einsum("ac,db->abcd", eye, right)
    r -= 1j * np.einsum("ab,ac,bd->abcd", w, eye, eye)
    if secular and couplings:
        cutoff = SECULAR_FACTOR * max(c.max_rate for c in couplings)
        mismatch = np.abs(w[:, :, None, None] - w[None, None, :, :])
        r[mismatch > cutoff] = 0.0
        # the coherent part sits on the diagonal, which always survives
    return r.reshape(n * n, n * n), energies, vecs


def bloch_redfield_evolve(
    h: np.ndarray,
    couplings: Sequence[NoiseCoupling],
    rho0: np.ndarray,
    t_grid: Sequence[float],
    secular: bool = True,
) -> Trajectory:
    """Propagate rho0 under the Redfield Liouvillian; states returned in the original basis."""
    liouvillian, energies, vecs = redfield_tensor(h, couplings, secular)
    n = energies.size
    grid = np.asarray(t_grid, dtype=float)
    rho_eb = vecs.conj().T @ np.asarray(rho0, dtype=complex) @ vecs
    vec0 = rho_eb.reshape(-1)
    elapsed = grid - grid[0]
    try:
        lam, modes = eig(liouvillian)
        condition = np.linalg.cond(modes)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigendecompositionError(f"Liouvillian diagonalization failed: {exc}") from exc

    if math.isfinite(condition) and condition <= CONDITION_LIMIT:
        coeffs = solve(modes, vec0)
        vecs_t = (modes @ (coeffs[:, None] * np.exp(np.outer(lam, elapsed)))).T
    else:
        logger.warning("Liouvillian eigenvectors ill-conditioned (%.2e); using expm", condition)
        vecs_t = np.empty((grid.size, n * n), dtype=complex)
        vecs_t[0] = vec0
        for i in range(1, grid.size):
            vecs_t[i] = expm(liouvillian * (elapsed[i] - elapsed[i - 1])) @ vecs_t[i - 1]

    states_eb = vecs_t.reshape(grid.size, n, n)
    states = vecs @ states_eb @ vecs.conj().T
    states = 0.5 * (states + np.conj(np.swapaxes(states, -1, -2)))
    return Trajectory(
        times=grid.copy(),
        states=states,
        frame=Frame.LAB,
        frame_energies=energies,
        step_us=0.0,
        metadata={"method": "bloch_redfield", "eigenvectors": vecs},
    )


def extract_decay_time(
    times: Sequence[float],
    values: Sequence[float],
    baseline: float | None = 0.0,
    window_constants: float = 3.0,
) -> float:
    """Exponential decay time from a log-linear least-squares fit.

    The fit uses samples within ``window_constants`` estimated decay times of
    the start, the estimate taken from the first 1/e crossing. ``baseline``
    is subtracted first; None uses the mean of the final 5% of the series.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.size != y.size or t.size < MIN_FIT_SAMPLES:
        raise FitError(f"decay fit needs >= {MIN_FIT_SAMPLES} paired samples, got {t.size}")
    if baseline is None:
        tail = max(1, int(math.ceil(0.05 * y.size)))
        baseline = float(np.mean(y[-tail:]))
    y = y - baseline
    if y[0] <= 0:
        raise FitError("series does not start above its baseline")
    below = np.nonzero(y <= y[0] / math.e)[0]
    if below.size:
        estimate = t[below[0]] - t[0]
        mask = t <= t[0] + window_constants * estimate
    else:
        mask = np.ones_like(t, dtype=bool)
    mask &= y > 0
    if np.count_nonzero(mask) < 3:
        raise FitError("too few positive samples in the fit window")
    tw, yw = t[mask], y[mask]
    slope, _ = np.polyfit(tw, np.log(yw), 1, w=yw / yw.max())
    if -slope * (tw[-1] - tw[0]) < 1e-9:
        raise FitError(f"series is not decaying (slope {slope:.3e})")
    return float(-1.0 / slope)

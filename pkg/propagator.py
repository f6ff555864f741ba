"""Time evolution of ladder amplitudes in the rotating frame.

Decay is carried by complex level energies -i/(2 tau_j); lost norm is population
that left the ladder. A constant Hamiltonian is propagated exactly through its
eigendecomposition, with an adaptive Runge-Kutta fallback when the eigenvector
matrix is ill-conditioned (near exceptional points of the non-Hermitian matrix).
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from errors import ConfigurationError, NumericalError
from result_store import render_table
from scheme import US, LadderScheme

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e8
RTOL = 1e-10
ATOL = 1e-12


@dataclass(frozen=True)
class RotatingFrameHamiltonian:
    matrix: np.ndarray

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def max_rabi(self) -> float:
        return 2.0 * float(np.max(np.abs(np.diag(self.matrix, 1)), initial=0.0))


@dataclass(frozen=True)
class AmplitudeTrajectory:
    times: np.ndarray
    populations: np.ndarray
    amplitudes: Optional[np.ndarray] = None
    fallback: bool = False

    @classmethod
    def from_amplitudes(cls, times, amplitudes, fallback=False):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        return cls(np.asarray(times, dtype=float), np.abs(amplitudes) ** 2, amplitudes, fallback)

    @property
    def norm(self) -> np.ndarray:
        return self.populations.sum(axis=1)

    def population(self, level: int) -> np.ndarray:
        return self.populations[:, level]

    def to_csv(self, scheme_fingerprint: str = '') -> str:
        n_levels = self.populations.shape[1]
        header = ['t_us'] + [f'n{j + 1}' for j in range(n_levels)] + ['norm']
        rows = np.column_stack([self.times / US, self.populations, self.norm])
        comments = [f'scheme={scheme_fingerprint}', f'fallback={str(self.fallback).lower()}']
        return render_table(header, rows, comments)


def ground_state(n_levels: int) -> np.ndarray:
    state = np.zeros(n_levels, dtype=complex)
    state[0] = 1.0
    return state


def build_hamiltonian(scheme: LadderScheme, r: float = 0.0) -> RotatingFrameHamiltonian:
    """Tridiagonal rotating-frame Hamiltonian at transverse distance r from the beam axis.

    Off-diagonals are Omega_j(r)/2; level j sits at minus the cumulative detuning
    of the transitions below it, with imaginary part -1/(2 tau_j).
    """
    if not r >= 0:
        raise ConfigurationError(f"r must be non-negative, got {r}")
    rabi = scheme.rabi_at(r)
    energies = np.concatenate(([0.0], -np.cumsum(scheme.detunings)))
    matrix = np.diag(energies - 0.5j * scheme.decay_rates)
    matrix += np.diag(0.5 * rabi, 1) + np.diag(0.5 * rabi, -1)
    matrix.setflags(write=False)
    return RotatingFrameHamiltonian(matrix)


class EigenPropagator:
    """exp(-iHt) for a constant non-Hermitian H through H = V diag(lambda) V^-1."""

    def __init__(self, hamiltonian: RotatingFrameHamiltonian):
        self.eigvals, self.eigvecs = scipy.linalg.eig(hamiltonian.matrix)
        self.condition = float(np.linalg.cond(self.eigvecs))

    @property
    def well_conditioned(self) -> bool:
        return np.isfinite(self.condition) and self.condition <= CONDITION_LIMIT

    def amplitudes(self, initial: np.ndarray, times: np.ndarray) -> np.ndarray:
        coeffs = np.linalg.solve(self.eigvecs, initial)
        phases = np.exp(-1j * np.outer(times, self.eigvals))
        return (phases * coeffs) @ self.eigvecs.T


def _check_inputs(dimension: int, initial, times):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ConfigurationError("times must be a non-empty 1-D sequence")
    if times[0] < 0 or np.any(np.diff(times) < 0):
        raise ConfigurationError("times must be ascending and start at t >= 0")
    if initial is None:
        initial = ground_state(dimension)
    initial = np.asarray(initial, dtype=complex)
    if initial.shape != (dimension,):
        raise ConfigurationError(f"initial state must have {dimension} components, got shape {initial.shape}")
    if np.vdot(initial, initial).real > 1.0 + 1e-12:
        raise ConfigurationError("initial state norm exceeds 1")
    return initial, times


def _max_step(max_rabi: float, t_end: float) -> float:
    step = t_end / 100
    if max_rabi > 0:
        step = min(step, 1.0 / (10 * max_rabi))
    return step


def integrate_rotating_frame(hamiltonian: RotatingFrameHamiltonian, initial, times,
                             rtol: float = RTOL, atol: float = ATOL) -> np.ndarray:
    """Dense DOP853 integration of i dC/dt = H C, sampled at ``times``."""
    initial, times = _check_inputs(hamiltonian.dimension, initial, times)
    t_end = float(times[-1])
    if t_end == 0:
        return np.tile(initial, (times.size, 1))
    generator = -1j * np.asarray(hamiltonian.matrix)
    sol = solve_ivp(lambda t, c: generator @ c, (0.0, t_end), initial, method='DOP853',
                    t_eval=times, rtol=rtol, atol=atol, max_step=_max_step(hamiltonian.max_rabi, t_end))
    if not sol.success:
        raise NumericalError(f"Runge-Kutta integration failed: {sol.message}")
    return sol.y.T


def integrate_explicit_phase(scheme: LadderScheme, r: float, initial, times,
                             rtol: float = RTOL, atol: float = ATOL) -> np.ndarray:
    """Integrate the laboratory-phase amplitude equations (time-dependent couplings).

    i dC_j/dt = -i C_j/(2 tau_j) + Omega_{j-1} C_{j-1} e^{-i delta_{j-1} t}/2 + Omega_j C_{j+1} e^{i delta_j t}/2

    Only populations are comparable with the rotating-frame amplitudes.
    """
    initial, times = _check_inputs(scheme.n_levels, initial, times)
    t_end = float(times[-1])
    if t_end == 0:
        return np.tile(initial, (times.size, 1))
    half_rabi = 0.5 * scheme.rabi_at(r)
    detunings = scheme.detunings
    half_rates = 0.5 * scheme.decay_rates

    def rhs(t, c):
        up = half_rabi * np.exp(1j * detunings * t)
        dc = -half_rates * c
        dc[:-1] += -1j * up * c[1:]
        dc[1:] += -1j * np.conj(up) * c[:-1]
        return dc

    max_scale = max(float(np.max(2 * half_rabi, initial=0.0)), float(np.max(np.abs(detunings), initial=0.0)))
    sol = solve_ivp(rhs, (0.0, t_end), initial, method='DOP853', t_eval=times,
                    rtol=rtol, atol=atol, max_step=_max_step(max_scale, t_end))
    if not sol.success:
        raise NumericalError(f"Runge-Kutta integration failed: {sol.message}")
    return sol.y.T


def propagate(hamiltonian: RotatingFrameHamiltonian, initial=None, times: Sequence[float] = (0.0,),
              rtol: float = RTOL, atol: float = ATOL) -> AmplitudeTrajectory:
    initial, times = _check_inputs(hamiltonian.dimension, initial, times)
    propagator = EigenPropagator(hamiltonian)
    if propagator.well_conditioned:
        return AmplitudeTrajectory.from_amplitudes(times, propagator.amplitudes(initial, times))
    logger.warning(
        "Eigenvector condition number %.2e exceeds %.0e; falling back to Runge-Kutta integration",
        propagator.condition, CONDITION_LIMIT,
    )
    amplitudes = integrate_rotating_frame(hamiltonian, initial, times, rtol=rtol, atol=atol)
    return AmplitudeTrajectory.from_amplitudes(times, amplitudes, fallback=True)


def rabi_trace(scheme: LadderScheme, r: float, t_end: float, n_points: int, initial=None) -> AmplitudeTrajectory:
    if not t_end > 0:
        raise ConfigurationError(f"t_end must be positive, got {t_end}")
    if n_points < 2:
        raise ConfigurationError(f"n_points must be at least 2, got {n_points}")
    logger.debug("Rabi trace for %s at r=%.3e m over %.3e s", scheme.name, r, t_end)
    times = np.linspace(0.0, t_end, n_points)
    return propagate(build_hamiltonian(scheme, r), initial, times)

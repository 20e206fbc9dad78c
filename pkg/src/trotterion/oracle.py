"""Ground-truth dense propagators, spectra, and time-ordered evolution.

Everything here goes through a Hermitian eigendecomposition: the
matrices are small (dimension <= 4096) and the spectra are needed for
level-population analysis anyway.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import RampSpec, ising2
from .pauli import StateVector, WeightedPauliSum, hamiltonian_matrix

DEGENERACY_TOL = 1e-9


class DegenerateGroundState(ValueError):
    """The ground level is degenerate; no unique ground state exists."""


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition with degenerate eigenvalues grouped into levels."""

    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # orthonormal columns, matching order
    levels: tuple  # tuple of (energy, index slice) per degenerate group

    def level_energies(self) -> np.ndarray:
        return np.array([e for e, _ in self.levels])


def _matrix_of(h) -> np.ndarray:
    if isinstance(h, WeightedPauliSum):
        return hamiltonian_matrix(h)
    return np.asarray(h, dtype=complex)


def _check_hermitian(m: np.ndarray) -> None:
    if np.max(np.abs(m - m.conj().T)) > 1e-9:
        raise ValueError("Hamiltonian matrix is not Hermitian")


def propagator(h, theta: float) -> np.ndarray:
    """exp(-i theta H) via eigendecomposition."""
    m = _matrix_of(h)
    _check_hermitian(m)
    w, v = np.linalg.eigh(m)
    return (v * np.exp(-1j * theta * w)) @ v.conj().T


def spectrum(h) -> Spectrum:
    """Full eigendecomposition with degeneracy grouping."""
    m = _matrix_of(h)
    _check_hermitian(m)
    w, v = np.linalg.eigh(m)
    levels = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > DEGENERACY_TOL:
            levels.append((float(np.mean(w[start:i])), slice(start, i)))
            start = i
    return Spectrum(w, v, tuple(levels))


def level_populations(psi0: StateVector, spec: Spectrum) -> np.ndarray:
    """Population of each degenerate level in the initial state."""
    if spec.eigenvectors.shape[0] != psi0.amps.shape[0]:
        raise ValueError("state dimension does not match spectrum")
    overlaps = np.abs(spec.eigenvectors.conj().T @ psi0.amps) ** 2
    return np.array([overlaps[sl].sum() for _, sl in spec.levels])


def instantaneous_ground_state(h) -> StateVector:
    """Lowest eigenvector, phase-fixed so its largest amplitude is real positive."""
    spec = spectrum(h)
    _, sl = spec.levels[0]
    if sl.stop - sl.start > 1:
        raise DegenerateGroundState("ground level is degenerate")
    vec = spec.eigenvectors[:, sl.start]
    k = int(np.argmax(np.abs(vec)))
    vec = vec * np.exp(-1j * np.angle(vec[k]))
    n = int(np.log2(len(vec)))
    return StateVector(n, vec)


def ramp_hamiltonian(ramp: RampSpec, theta: float) -> WeightedPauliSum:
    return ising2(ramp.B, ramp.J_at(theta))


def time_ordered_propagator(
    ramp: RampSpec, fine_steps: int = 2000, theta_end: float | None = None
) -> np.ndarray:
    """Ordered product of short exact propagators over a fine theta grid.

    Uses the midpoint coupling of each slice; doubling fine_steps moves
    the result by less than 1e-8 for the bundled ramps.
    """
    if fine_steps < 1:
        raise ValueError("fine_steps must be >= 1")
    theta_end = ramp.theta_t if theta_end is None else theta_end
    dtheta = theta_end / fine_steps
    u = np.eye(4, dtype=complex)
    for k in range(fine_steps):
        mid = (k + 0.5) * dtheta
        u = propagator(ramp_hamiltonian(ramp, mid), dtheta) @ u
    return u


def ramp_evolution(
    ramp: RampSpec, psi0: StateVector, thetas: np.ndarray, fine_per_unit: int = 2000
) -> list:
    """States of the exact time-dependent evolution at the given phases.

    fine_per_unit is the number of integration slices per unit of theta_t.
    """
    thetas = np.asarray(thetas, dtype=float)
    if np.any(np.diff(thetas) < 0):
        raise ValueError("theta grid must be nondecreasing")
    states = []
    psi = psi0.amps.copy()
    prev = 0.0
    for th in thetas:
        span = th - prev
        if span > 0:
            steps = max(1, int(np.ceil(fine_per_unit * span / ramp.theta_t)))
            dtheta = span / steps
            for k in range(steps):
                mid = prev + (k + 0.5) * dtheta
                h = ramp_hamiltonian(ramp, mid)
                psi = propagator(h, dtheta) @ psi
        prev = th
        states.append(StateVector(psi0.n, psi.copy()))
    return states

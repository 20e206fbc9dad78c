"""Exact n-spin states, Pauli-string operators, and observable extraction.

Conventions (fixed once, used everywhere):

* ``|0> == |up>`` and ``sigma_z |up> = +|up>``.
* Spin ``j`` maps to bit ``j`` of the amplitude index, little-endian.
  A set bit means the spin points down.
* Dense complex amplitudes throughout; dimensions stay at or below 2**12.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_SPINS = 12

_PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class DimensionError(ValueError):
    """Spin counts do not match, or exceed the dense-representation limit."""


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_SPINS:
        raise DimensionError(f"spin count {n} outside supported range 1..{MAX_SPINS}")


@dataclass(frozen=True)
class PauliString:
    """A tensor product of single-spin Pauli operators, one per spin."""

    n: int
    ops: str

    def __post_init__(self):
        _check_n(self.n)
        if len(self.ops) != self.n:
            raise DimensionError(f"ops length {len(self.ops)} != n={self.n}")
        bad = set(self.ops) - set("IXYZ")
        if bad:
            raise ValueError(f"invalid Pauli letters: {sorted(bad)}")

    @classmethod
    def from_string(cls, ops: str) -> "PauliString":
        return cls(len(ops), ops)

    @property
    def is_identity(self) -> bool:
        return set(self.ops) <= {"I"}

    def weight(self) -> int:
        return sum(1 for c in self.ops if c != "I")

    def matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix, little-endian spin order."""
        out = np.array([[1.0 + 0j]])
        for c in self.ops:
            out = np.kron(_PAULI_MATS[c], out)
        return out

    def __str__(self) -> str:
        return self.ops


@dataclass(frozen=True)
class WeightedPauliSum:
    """Real linear combination of Pauli strings on a common spin register."""

    n: int
    terms: tuple = ()

    def __post_init__(self):
        _check_n(self.n)
        for coeff, p in self.terms:
            if p.n != self.n:
                raise DimensionError(f"term {p} has n={p.n}, expected {self.n}")
            if not np.isfinite(coeff):
                raise ValueError(f"non-finite coefficient {coeff} on {p}")

    @classmethod
    def from_terms(cls, n: int, terms) -> "WeightedPauliSum":
        return cls(n, tuple((float(c), p) for c, p in terms))

    def __add__(self, other: "WeightedPauliSum") -> "WeightedPauliSum":
        if other.n != self.n:
            raise DimensionError("cannot add sums on different spin counts")
        return WeightedPauliSum(self.n, self.terms + other.terms)

    def scaled(self, factor: float) -> "WeightedPauliSum":
        return WeightedPauliSum(self.n, tuple((factor * c, p) for c, p in self.terms))


@dataclass
class StateVector:
    """Pure state of n spins as 2^n complex amplitudes."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (2**self.n,):
            raise DimensionError(
                f"amplitude vector has shape {self.amps.shape}, expected ({2**self.n},)"
            )

    @classmethod
    def basis(cls, n: int, index: int) -> "StateVector":
        amps = np.zeros(2**n, dtype=complex)
        amps[index] = 1.0
        return cls(n, amps)

    @classmethod
    def all_up(cls, n: int) -> "StateVector":
        return cls.basis(n, 0)

    @classmethod
    def all_down(cls, n: int) -> "StateVector":
        return cls.basis(n, 2**n - 1)

    @classmethod
    def from_label(cls, label: str) -> "StateVector":
        """Product state from a little-endian label over {u, d} (spin 0 first)."""
        bits = 0
        for j, c in enumerate(label):
            if c == "d":
                bits |= 1 << j
            elif c != "u":
                raise ValueError(f"invalid spin label character {c!r}")
        return cls.basis(len(label), bits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def overlap(self, other: "StateVector") -> complex:
        if other.n != self.n:
            raise DimensionError("overlap between different spin counts")
        return complex(np.vdot(self.amps, other.amps))


@dataclass
class DensityMatrix:
    """Mixed state of n spins; Hermitian, unit trace, positive semidefinite."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        self.matrix = np.asarray(self.matrix, dtype=complex)
        d = 2**self.n
        if self.matrix.shape != (d, d):
            raise DimensionError(f"density matrix shape {self.matrix.shape} != ({d},{d})")

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityMatrix":
        return cls(state.n, np.outer(state.amps, state.amps.conj()))

    def validate(self, tol: float = 1e-10) -> None:
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > tol:
            raise ValueError(f"trace {np.trace(m)} != 1")
        if np.linalg.eigvalsh(m).min() < -1e-8:
            raise ValueError("density matrix has a significantly negative eigenvalue")


def _apply_single_spin(amps: np.ndarray, n: int, j: int, mat: np.ndarray) -> np.ndarray:
    """Apply a 2x2 matrix to spin j of an amplitude vector or column batch.

    Fortran-order reshape makes axis j correspond to bit j of the
    little-endian amplitude index.
    """
    shape = [2] * n + ([-1] if amps.ndim > 1 else [])
    a = amps.reshape(shape, order="F")
    a = np.moveaxis(a, j, 0)
    a = np.tensordot(mat, a, axes=([1], [0]))
    a = np.moveaxis(a, 0, j)
    return a.reshape(amps.shape, order="F")


def apply_pauli(state: StateVector, p: PauliString) -> StateVector:
    """Return P|psi> for a Pauli string P."""
    if p.n != state.n:
        raise DimensionError(f"operator on {p.n} spins applied to {state.n}-spin state")
    amps = state.amps
    for j, c in enumerate(p.ops):
        if c != "I":
            amps = _apply_single_spin(amps, state.n, j, _PAULI_MATS[c])
    return StateVector(state.n, amps)


def expectation(state: StateVector, p: PauliString) -> float:
    """<psi|P|psi>; real for Pauli strings, clipped to [-1, 1]."""
    val = np.vdot(state.amps, apply_pauli(state, p).amps)
    return float(np.clip(val.real, -1.0, 1.0))


def hamming_histogram(state: StateVector) -> np.ndarray:
    """Probability of finding exactly i spins pointing down, i = 0..n."""
    n = state.n
    probs = state.probabilities()
    weights = np.array([bin(i).count("1") for i in range(2**n)])
    hist = np.zeros(n + 1)
    np.add.at(hist, weights, probs)
    return hist


def hamiltonian_matrix(h: WeightedPauliSum) -> np.ndarray:
    """Dense Hermitian matrix of a weighted Pauli sum."""
    d = 2**h.n
    out = np.zeros((d, d), dtype=complex)
    for coeff, p in h.terms:
        out += coeff * p.matrix()
    return out

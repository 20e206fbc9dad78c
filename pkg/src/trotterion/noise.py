"""Coupling-strength fluctuation and phase-miscalibration error models.

The dominant hardware error is a slow fluctuation of the laser-ion
coupling strength: constant within one sequence, Gaussian from sequence
to sequence. Entangling and light-shift phases scale quadratically with
the coupling, collective-rotation phases linearly, so one relative
error epsilon perturbs a whole sequence coherently.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gates import GateOp, GateSequence, apply_sequence
from .pauli import PauliString, StateVector, expectation

_QUADRATIC_KINDS = ("O1", "O2", "O4")


@dataclass(frozen=True)
class NoiseParams:
    """Fluctuation width, deterministic miscalibrations, and sampling."""

    sigma_rel: float = 0.0
    miscal: dict = field(default_factory=dict)
    shots: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.sigma_rel < 0:
            raise ValueError("sigma_rel must be nonnegative")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1")
        for kind, err in self.miscal.items():
            if kind not in ("O1", "O2", "O3", "O4"):
                raise ValueError(f"unknown gate kind {kind!r}")
            if abs(err) >= 0.1:
                raise ValueError("miscalibration must stay below 10%")


@dataclass(frozen=True)
class ShotEnsemble:
    """Aggregated per-observable estimates over a noisy shot ensemble."""

    shots: int
    estimates: np.ndarray  # one value per observable
    errors: np.ndarray  # binomial standard errors, 0 in analytic mode

    def __post_init__(self):
        object.__setattr__(self, "estimates", np.asarray(self.estimates, dtype=float))
        object.__setattr__(self, "errors", np.asarray(self.errors, dtype=float))


def perturb_sequence(seq: GateSequence, eps: float) -> GateSequence:
    """Scale every gate phase by the stated power of (1 + eps)."""
    if eps <= -1:
        raise ValueError("relative coupling error must exceed -1")
    scale2 = (1 + eps) ** 2
    gates = tuple(
        GateOp(
            g.kind,
            g.theta * (scale2 if g.kind in _QUADRATIC_KINDS else 1 + eps),
            g.phi,
            g.target,
        )
        for g in seq.gates
    )
    return GateSequence(seq.n, gates, dict(seq.metadata))


def apply_miscalibration(program, kind: str, rel_err: float):
    """Deterministically scale the phase of every gate of one kind."""
    if abs(rel_err) >= 0.1:
        raise ValueError("miscalibration must stay below 10%")
    seq = program.sequence if hasattr(program, "sequence") else program
    gates = tuple(
        GateOp(g.kind, g.theta * (1 + rel_err) if g.kind == kind else g.theta, g.phi, g.target)
        for g in seq.gates
    )
    out = GateSequence(seq.n, gates, dict(seq.metadata))
    if hasattr(program, "sequence"):
        from dataclasses import replace

        return replace(program, sequence=out)
    return out


def _apply_params(seq: GateSequence, params: NoiseParams, eps: float) -> GateSequence:
    for kind, err in params.miscal.items():
        seq = apply_miscalibration(seq, kind, err)
    if eps != 0.0:
        seq = perturb_sequence(seq, eps)
    return seq


def _observe(state: StateVector, obs) -> float:
    """Expectation of a Pauli string, or any callable on the state."""
    if isinstance(obs, PauliString):
        return expectation(state, obs)
    return float(obs(state))


def _success_probability(state: StateVector, obs) -> float:
    """Probability of the favorable outcome for one projective sample."""
    if isinstance(obs, PauliString):
        return (1 + expectation(state, obs)) / 2
    return float(obs(state))


def _draw_eps(rng, sigma: float) -> float:
    # reject eps <= -1: a negative coupling strength is unphysical
    while True:
        eps = sigma * rng.standard_normal()
        if eps > -1:
            return eps


def run_noisy_ensemble(
    program,
    psi0: StateVector,
    observables,
    params: NoiseParams,
) -> ShotEnsemble:
    """Monte-Carlo estimate of observables under per-sequence fluctuation.

    One epsilon is drawn per shot from an independent substream of
    (seed, shot index), the whole perturbed sequence is propagated, and
    each observable contributes one projective sample. With shots=None
    the exact expectations of the unperturbed (but miscalibrated)
    sequence are returned.
    """
    seq = program.sequence if hasattr(program, "sequence") else program
    observables = list(observables)
    if params.shots is None:
        clean = _apply_params(seq, params, 0.0)
        out = apply_sequence(psi0, clean)
        vals = np.array([_observe(out, p) for p in observables])
        return ShotEnsemble(0, vals, np.zeros_like(vals))
    pauli = [isinstance(p, PauliString) for p in observables]
    hits = np.zeros(len(observables))
    for shot in range(params.shots):
        rng = np.random.default_rng(np.random.SeedSequence(params.seed, spawn_key=(shot,)))
        eps = _draw_eps(rng, params.sigma_rel)
        out = apply_sequence(psi0, _apply_params(seq, params, eps))
        for i, p in enumerate(observables):
            hits[i] += rng.random() < _success_probability(out, p)
    prob = hits / params.shots
    err_p = np.sqrt(np.clip(prob * (1 - prob), 1e-12, None) / params.shots)
    est = np.where(pauli, 2 * prob - 1, prob)
    err = np.where(pauli, 2 * err_p, err_p)
    return ShotEnsemble(params.shots, est, err)


def ensemble_mean_expectation(
    program,
    psi0: StateVector,
    observable,
    sigma_rel: float,
    samples: int,
    seed: int = 0,
) -> float:
    """Fluctuation-averaged exact expectation (no projective sampling).

    Uses common random numbers: the epsilon draw for sample k is
    sigma_rel times the k-th unit normal of the seed's stream, so sweeps
    over sigma_rel are directly comparable.
    """
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(samples)
    seq = program.sequence if hasattr(program, "sequence") else program
    total = 0.0
    for zk in z:
        eps = max(sigma_rel * zk, -1 + 1e-12)
        out = apply_sequence(psi0, perturb_sequence(seq, eps) if eps else seq)
        total += _observe(out, observable)
    return total / samples

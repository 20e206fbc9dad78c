"""Fourier gap-extraction tests."""
import numpy as np
import pytest

from trotterion.models import long_range_ising
from trotterion.oracle import propagator, spectrum
from trotterion.pauli import StateVector, hamming_histogram
from trotterion.spectral import (
    ObservableTrace,
    dominant_frequency,
    predicted_gaps,
    spectrum_of_trace,
)


def synthetic_trace(freq: float, n_points: int = 128, span: float = 8 * np.pi):
    thetas = np.linspace(0.0, span, n_points, endpoint=False)
    return ObservableTrace(thetas, np.cos(freq * thetas), "synthetic")


def p2_trace(n_steps: int = 48):
    model, _ = long_range_ising(4, 0.5, 1.0)
    dtheta = np.pi / 16
    psi0 = StateVector.all_up(4)
    thetas = dtheta * np.arange(n_steps)
    vals = [
        float(hamming_histogram(StateVector(4, propagator(model, th) @ psi0.amps))[2])
        for th in thetas
    ]
    return ObservableTrace(thetas, np.array(vals), "P2")


def test_trace_validation():
    with pytest.raises(ValueError):
        ObservableTrace(np.array([0.0, 1.0, 3.0]), np.zeros(3))
    with pytest.raises(ValueError):
        ObservableTrace(np.array([0.0, 1.0]), np.zeros(3))


def test_minimum_samples():
    t = ObservableTrace(np.arange(4, dtype=float), np.zeros(4))
    with pytest.raises(ValueError):
        spectrum_of_trace(t)


def test_constant_trace_has_zero_spectrum():
    t = ObservableTrace(np.arange(16, dtype=float), np.full(16, 0.7))
    _, amps = spectrum_of_trace(t)
    assert np.max(amps) < 1e-12


def test_synthetic_sinusoid_peak_within_one_bin():
    t = synthetic_trace(2.5)
    freqs, _ = spectrum_of_trace(t)
    bin_width = freqs[1] - freqs[0]
    assert abs(dominant_frequency(t) - 2.5) <= bin_width


def test_zero_padding_sharpens_without_moving_peak():
    t = synthetic_trace(2.5)
    freqs, _ = spectrum_of_trace(t)
    raw_bin = freqs[1] - freqs[0]
    assert abs(dominant_frequency(t, zero_pad=4) - dominant_frequency(t)) <= raw_bin


def test_predicted_gaps_eigenstate_empty():
    model, _ = long_range_ising(3, 0.5, 1.0)
    spec = spectrum(model)
    gs = StateVector(3, spec.eigenvectors[:, 0])
    assert predicted_gaps(model, gs) == []


def test_predicted_gaps_two_level_superposition():
    model, _ = long_range_ising(3, 0.5, 1.0)
    spec = spectrum(model)
    v = (spec.eigenvectors[:, 0] + spec.eigenvectors[:, -1]) / np.sqrt(2)
    gaps = predicted_gaps(model, StateVector(3, v))
    assert len(gaps) == 1
    want = spec.eigenvalues[-1] - spec.eigenvalues[0]
    assert gaps[0][0] == pytest.approx(want)
    assert gaps[0][1] == pytest.approx(0.25)


def test_four_spin_long_range_has_three_gaps():
    model, _ = long_range_ising(4, 0.5, 1.0)
    gaps = predicted_gaps(model, StateVector.all_up(4))
    assert len(gaps) == 3


def test_p2_trace_peak_at_predicted_gap():
    model, _ = long_range_ising(4, 0.5, 1.0)
    gaps = predicted_gaps(model, StateVector.all_up(4))
    t = p2_trace()
    freqs, _ = spectrum_of_trace(t)
    bin_width = freqs[1] - freqs[0]
    peak = dominant_frequency(t)
    assert any(abs(peak - g) <= bin_width for g, _ in gaps)

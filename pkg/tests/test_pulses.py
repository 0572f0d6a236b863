"""Pulse mode definitions, normalization and evaluation."""

import math

import numpy as np
import pytest

from stimemit.pulses import (
    ExponentialPulse,
    PulseError,
    SampledPulse,
    SquarePulse,
    normalize,
)


def test_exponential_evaluate_examples():
    p = ExponentialPulse(1.0)
    assert p.evaluate(0.0) == 1.0
    assert p.evaluate(-1.0) == 0.0
    assert p.evaluate(2.0) == pytest.approx(math.exp(-1.0))


def test_square_evaluate_examples():
    p = SquarePulse(4.0)
    assert p.evaluate(2.0) == 0.5
    assert p.evaluate(-0.1) == 0.0
    assert p.evaluate(4.0) == 0.0  # right-open support
    assert p.evaluate(3.999999) == 0.5


def test_analytic_norms_exact():
    assert ExponentialPulse(0.35).norm_squared() == 1.0
    assert SquarePulse(7.0).norm_squared() == 1.0


def test_sampled_norm_close_to_analytic():
    # exponential tabulated on [0, 20 tau] at 1e4 points
    tau = 1.0
    n = 10_000
    dt = 20.0 * tau / (n - 1)
    t = np.arange(n) * dt
    pulse = normalize(0.0, dt, np.exp(-t / (2 * tau)))
    assert pulse.norm_squared() == pytest.approx(1.0, abs=1e-6)


def test_normalize_constant():
    pulse = normalize(0.0, 1.0 / 999, np.full(1000, 2.0))
    assert abs(pulse.evaluate(0.5)) == pytest.approx(1.0, abs=1e-3)


def test_normalize_idempotent():
    t = np.linspace(0.0, 30.0, 3000)
    pulse = normalize(0.0, t[1] - t[0], np.exp(-t / 2))
    again = normalize(0.0, t[1] - t[0], pulse.amplitudes)
    diff = max(abs(a - b) for a, b in zip(pulse.amplitudes, again.amplitudes))
    assert diff < 1e-12


def test_normalized_samples_match_analytic_exponential():
    t = np.linspace(0.0, 30.0, 6000)
    pulse = normalize(0.0, t[1] - t[0], np.exp(-t))
    ref = ExponentialPulse(1.0)  # exp(-t) samples ~ exp(-t/2tau) with tau=1... times 1/2 widths
    # e^{-t} = e^{-t/(2*0.5)}: the tabulated pulse is an exponential of tau=0.5
    ref = ExponentialPulse(0.5)
    for tv in [0.0, 0.3, 1.0, 2.5, 7.0]:
        assert pulse.evaluate(tv) == pytest.approx(ref.evaluate(tv), abs=1e-4)


def test_normalize_rejects_degenerate():
    with pytest.raises(PulseError, match="degenerate"):
        normalize(0.0, 0.1, np.zeros(50))


def test_sampled_rejects_unnormalized():
    with pytest.raises(PulseError, match="not normalized"):
        SampledPulse(0.0, 0.1, tuple(np.ones(100) * 2.0))


def test_sampled_interpolation_and_support():
    pulse = normalize(0.0, 1.0, [0.0, 1.0, 0.0])
    mid = pulse.evaluate(0.5)
    assert mid == pytest.approx(0.5 * pulse.evaluate(1.0))
    assert pulse.evaluate(2.5) == 0.0
    assert pulse.evaluate(-0.5) == 0.0


@pytest.mark.parametrize(
    "pulse",
    [
        ExponentialPulse(0.35),
        SquarePulse(3.0),
        normalize(0.0, 30.0 / 4999, np.exp(-np.linspace(0, 30, 5000) / 2)),
    ],
)
def test_numeric_norm_matches_norm_squared(pulse):
    # integrating |evaluate|^2 over the support reproduces norm_squared
    t = np.linspace(0.0, pulse.support_end(), 200_001)
    vals = np.array([abs(pulse.evaluate(v)) ** 2 for v in t])
    num = np.trapezoid(vals, t)
    assert num == pytest.approx(pulse.norm_squared(), abs=1e-6)


def test_evaluate_is_deterministic():
    p = ExponentialPulse(0.7)
    assert p.evaluate(1.2345) == p.evaluate(1.2345)
    s = normalize(0.0, 0.01, np.exp(-np.arange(1000) * 0.01))
    assert s.evaluate(3.21) == s.evaluate(3.21)


def test_invalid_parameters_rejected():
    with pytest.raises(PulseError):
        ExponentialPulse(0.0)
    with pytest.raises(PulseError):
        ExponentialPulse(-1.0)
    with pytest.raises(PulseError):
        SquarePulse(0.0)
    with pytest.raises(PulseError):
        SampledPulse(0.0, -0.1, (1.0, 1.0))
    with pytest.raises(PulseError):
        normalize(0.0, 0.1, [1.0])


def test_complex_sampled_pulse():
    amps = np.exp(-np.linspace(0, 20, 2000)) * (1 + 1j)
    pulse = normalize(0.0, 20 / 1999, amps)
    assert not pulse.is_real()
    assert pulse.norm_squared() == pytest.approx(1.0, abs=1e-9)

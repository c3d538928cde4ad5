"""Reference phase and frequency estimators: HT, NHT and DQ.

All phases use the cosine convention (``x = a cos(phase)``) and are
unwrapped, so they can be compared sample for sample with JADE output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spline as sp
from .core import Signal, SignalError, local_extrema

CLIP_TOL = 1e-6


@dataclass(frozen=True)
class AnalyticSignal:
    real_part: np.ndarray
    imag_part: np.ndarray

    @property
    def z(self) -> np.ndarray:
        return self.real_part + 1j * self.imag_part


@dataclass(frozen=True)
class NormalizationTrace:
    envelopes: list
    normalized: np.ndarray
    iterations: int
    converged: bool


def _split(signal):
    if isinstance(signal, Signal):
        return signal.samples, signal.sample_period
    return np.asarray(signal, dtype=float), 1.0


def analytic_signal(signal) -> AnalyticSignal:
    """One-sided spectrum construction: DC and Nyquist kept, positive bins
    doubled, negative bins zeroed."""
    x, _ = _split(signal)
    n = x.size
    if n < 4:
        raise SignalError("need at least 4 samples")
    X = np.fft.fft(x)
    h = np.zeros(n)
    h[0] = 1.0
    if n % 2 == 0:
        h[n // 2] = 1.0
        h[1 : n // 2] = 2.0
    else:
        h[1 : (n + 1) // 2] = 2.0
    z = np.fft.ifft(X * h)
    return AnalyticSignal(x.copy(), z.imag)


def _frequency(phase: np.ndarray, dt: float) -> np.ndarray:
    return np.gradient(phase) / (2 * np.pi * dt)


def ht_phase_if(signal):
    """Unwrapped angle of the analytic signal and its central-difference IF (Hz)."""
    x, dt = _split(signal)
    a = analytic_signal(x)
    phase = np.unwrap(np.arctan2(a.imag_part, a.real_part))
    return phase, _frequency(phase, dt)


def _envelope(y: np.ndarray) -> np.ndarray:
    mag = np.abs(y)
    peaks, _ = local_extrema(mag)
    if peaks.size < 2:
        raise SignalError("need at least 2 local maxima of |x|")
    spl = sp.fit(peaks.astype(float), mag[peaks])
    env = np.empty(y.size)
    t = np.arange(y.size, dtype=float)
    inside = (t >= peaks[0]) & (t <= peaks[-1])
    env[inside] = sp.evaluate(spl, t[inside])
    # constant past the end knots, raised to cover the edge samples, which
    # are never interior maxima
    env[: peaks[0]] = max(mag[peaks[0]], mag[: peaks[0]].max(initial=0.0))
    env[peaks[-1] + 1 :] = max(mag[peaks[-1]], mag[peaks[-1] + 1 :].max(initial=0.0))
    if np.any(env <= 0):
        raise SignalError("degenerate envelope")
    return env


def normalize_am(signal, max_iterations: int = 10) -> NormalizationTrace:
    """Divide by a spline envelope of ``|x|`` until ``max |y| <= 1``."""
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    y, _ = _split(signal)
    y = y.copy()
    envs = []
    converged = False
    for _ in range(max_iterations):
        e = _envelope(y)
        envs.append(e)
        y = y / e
        if np.max(np.abs(y)) <= 1.0 + CLIP_TOL:
            converged = True
            break
    return NormalizationTrace(envs, y, len(envs), converged)


def nht_phase_if(signal, max_iterations: int = 10):
    """HT phase of the envelope-normalised signal."""
    x, dt = _split(signal)
    trace = normalize_am(x, max_iterations)
    return ht_phase_if(Signal(trace.normalized, dt))


def dq_phase(y) -> np.ndarray:
    """Direct quadrature phase of a normalised FM signal.

    ``theta = arctan(y / sqrt(1 - y^2))`` is ambiguous between the falling
    and rising half of the cosine; the sign of the local slope of ``y``
    picks the branch.
    """
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) > 1.0 + CLIP_TOL):
        raise SignalError("normalization failed")
    y = np.clip(y, -1.0, 1.0)
    # arctan2 gives the +-pi/2 limit at |y| = 1
    theta = np.arctan2(y, np.sqrt(1.0 - y * y))
    falling = np.gradient(y) <= 0
    wrapped = np.where(falling, np.pi / 2 - theta, theta - np.pi / 2)
    return np.unwrap(wrapped)


def dq_phase_if(signal, max_iterations: int = 10):
    x, dt = _split(signal)
    trace = normalize_am(x, max_iterations)
    y = trace.normalized
    if not trace.converged and np.any(np.abs(y) > 1.0 + CLIP_TOL):
        raise SignalError("normalization failed")
    phase = dq_phase(y)
    return phase, _frequency(phase, dt)


METHODS = {"ht": ht_phase_if, "nht": nht_phase_if, "dq": dq_phase_if}

"""Shared signal container and small numerical helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SignalError(ValueError):
    """Raised when input data violates a precondition."""


@dataclass(frozen=True)
class Signal:
    """Uniformly sampled real-valued series.

    ``samples`` is stored as a read-only float64 array.
    """

    samples: np.ndarray
    sample_period: float = 1.0
    start_time: float = 0.0

    def __post_init__(self):
        x = np.array(self.samples, dtype=float).ravel()
        if x.size == 0:
            raise SignalError("signal is empty")
        if not np.all(np.isfinite(x)):
            raise SignalError("signal contains non-finite values")
        if not (np.isfinite(self.sample_period) and self.sample_period > 0):
            raise SignalError("sample_period must be positive")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_period", float(self.sample_period))
        object.__setattr__(self, "start_time", float(self.start_time))

    def __len__(self):
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.start_time + self.sample_period * np.arange(len(self))

    def with_samples(self, samples) -> "Signal":
        """Same time base, new values."""
        return Signal(samples, self.sample_period, self.start_time)


@dataclass(frozen=True)
class NoiseSpec:
    """Additive white Gaussian noise ``sigma_scale * xi_n``.

    The stream is numpy's PCG64 generator seeded with ``seed``; its
    ``standard_normal`` output is stable across platforms for a given seed.
    """

    sigma_scale: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.sigma_scale) or self.sigma_scale < 0:
            raise SignalError("sigma_scale must be finite and non-negative")

    def draws(self, n: int) -> np.ndarray:
        return np.random.Generator(np.random.PCG64(self.seed)).standard_normal(n)


def _as_array(x) -> np.ndarray:
    if isinstance(x, Signal):
        return x.samples
    return np.asarray(x, dtype=float)


def local_extrema(signal) -> tuple[np.ndarray, np.ndarray]:
    """Indices of strict interior maxima and minima.

    A flat run bounded by a rise and a fall counts once, at its midpoint
    (rounded down).
    """
    x = _as_array(signal)
    if x.size < 3:
        raise SignalError("insufficient samples")
    d = np.sign(np.diff(x))
    nz = np.flatnonzero(d)
    if nz.size < 2:
        return np.array([], dtype=int), np.array([], dtype=int)
    s = d[nz]
    turn = np.flatnonzero(s[:-1] != s[1:])
    # flat run between diff index nz[t] and nz[t+1] covers samples nz[t]+1 .. nz[t+1]
    lo = nz[turn] + 1
    hi = nz[turn + 1]
    mid = (lo + hi) // 2
    is_max = s[turn] > 0
    return mid[is_max].astype(int), mid[~is_max].astype(int)


def count_extrema(signal) -> int:
    mx, mn = local_extrema(signal)
    return mx.size + mn.size


def moving_average(signal, window: int):
    """Centered moving average; edge samples average over the in-range part
    of the window. Returns the same type it was given."""
    x = _as_array(signal)
    window = int(window)
    if window < 1 or window % 2 == 0:
        raise SignalError("window must be a positive odd integer")
    if window > x.size:
        raise SignalError("window longer than signal")
    if window == 1:
        out = x.copy()
    else:
        h = window // 2
        c = np.concatenate(([0.0], np.cumsum(x)))
        idx = np.arange(x.size)
        lo = np.maximum(idx - h, 0)
        hi = np.minimum(idx + h + 1, x.size)
        out = (c[hi] - c[lo]) / (hi - lo)
    if isinstance(signal, Signal):
        return signal.with_samples(out)
    return out


def snr_db(signal, noise) -> float:
    """``20 log10(||signal|| / ||noise||)``."""
    s = _as_array(signal)
    w = _as_array(noise)
    if s.shape != w.shape:
        raise SignalError("signal and noise lengths differ")
    nw = np.linalg.norm(w)
    if nw == 0:
        raise SignalError("noise has zero norm")
    return float(20.0 * np.log10(np.linalg.norm(s) / nw))


def add_noise(signal: Signal, spec: NoiseSpec) -> Signal:
    if spec.sigma_scale == 0:
        return signal
    return signal.with_samples(signal.samples + spec.sigma_scale * spec.draws(len(signal)))


def relative_l2(estimate, reference) -> float:
    a = _as_array(estimate)
    b = _as_array(reference)
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def correlation(a, b) -> float:
    a = _as_array(a)
    b = _as_array(b)
    return float(np.corrcoef(a, b)[0, 1])


def interior(n: int, fraction: float = 0.8) -> slice:
    """Central ``fraction`` of ``n`` samples."""
    cut = int(round(n * (1.0 - fraction) / 2.0))
    return slice(cut, n - cut)

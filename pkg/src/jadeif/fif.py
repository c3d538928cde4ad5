"""Fast Iterative Filtering.

Each IMF is obtained by iterating ``s <- s - s * w`` with a low-pass filter
``w`` whose length adapts to the extrema density of the current remainder.
The iteration is carried out in the frequency domain on a reflectively
extended copy of the signal, where ``m`` steps amount to multiplying the
spectrum by ``(1 - w_hat) ** m``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .core import Signal, SignalError, count_extrema, local_extrema

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FifConfig:
    delta: float = 1e-3
    max_inner_iterations: int = 200
    max_imfs: int = 32
    xi: float = 8.0
    extension_factor: int = 2
    # stop once the remainder, measured away from the edges by the last
    # filter half-length, falls below this fraction of the input there
    remainder_tol: float = 0.02

    def __post_init__(self):
        if self.delta <= 0 or self.xi <= 0:
            raise ValueError("delta and xi must be positive")
        if self.max_inner_iterations < 1 or self.max_imfs < 1:
            raise ValueError("iteration limits must be >= 1")
        if self.extension_factor < 0:
            raise ValueError("extension_factor must be >= 0")


@dataclass(frozen=True)
class FifFilter:
    taps: np.ndarray  # index k <-> offset k - half_length
    half_length: int

    def __post_init__(self):
        if self.taps.size != 2 * self.half_length + 1:
            raise ValueError("taps length must be 2*half_length + 1")


@dataclass(frozen=True)
class Decomposition:
    imfs: list
    remainder: Signal
    config_used: FifConfig
    filter_lengths: list = field(default_factory=list)
    iterations: list = field(default_factory=list)

    def as_array(self) -> np.ndarray:
        """IMFs stacked row-wise, remainder last."""
        rows = [imf.samples for imf in self.imfs] + [self.remainder.samples]
        return np.vstack(rows)

    def reconstruction(self) -> np.ndarray:
        return self.as_array().sum(axis=0)


def base_filter(half_width: int) -> np.ndarray:
    """Unit-area raised cosine on offsets ``-half_width .. half_width``."""
    k = np.arange(-half_width, half_width + 1)
    w = 0.5 * (1.0 + np.cos(np.pi * k / (half_width + 1)))
    return w / w.sum()


def build_filter(half_length: int) -> FifFilter:
    """Self-convolution of a raised cosine of half width ``ceil(L/2)``.

    The realised support is ``2 * ceil(L/2)``, i.e. ``L`` for even ``L``
    and ``L + 1`` for odd ``L``.
    """
    if half_length < 1:
        raise ValueError("half_length must be >= 1")
    h = -(-int(half_length) // 2)
    b = base_filter(h)
    w = np.convolve(b, b)
    w = 0.5 * (w + w[::-1])
    w /= w.sum()
    return FifFilter(w, 2 * h)


def filter_length(signal, xi: float) -> int:
    """``max(1, round(xi * N / k))`` with ``k`` the interior extrema count."""
    x = signal.samples if isinstance(signal, Signal) else np.asarray(signal, float)
    k = count_extrema(x)
    if k < 2:
        raise SignalError("signal is a trend")
    return max(1, int(round(xi * x.size / k)))


def _extend(x: np.ndarray, pad: int) -> np.ndarray:
    if pad == 0:
        return x.copy()
    return np.pad(x, pad, mode="symmetric")


def filter_response(filt: FifFilter, size: int) -> np.ndarray:
    """Real DFT of the zero-phase filter laid out circularly on ``size`` points."""
    if filt.taps.size > size:
        raise ValueError("filter longer than extended signal")
    h = np.zeros(size)
    L = filt.half_length
    h[: L + 1] = filt.taps[L:]
    if L:
        h[-L:] = filt.taps[:L]
    return np.real(np.fft.rfft(h))


def sift(signal, filt: FifFilter, config: FifConfig = FifConfig(), iterations: int | None = None):
    """Extract one IMF.

    Iterates ``s_{m+1} = s_m - s_m * w`` until the relative change on the
    original (unextended) range drops to ``config.delta``. With
    ``iterations`` given, exactly that many steps are applied instead.
    Returns ``(imf, steps)``; ``imf`` has the input's type.
    """
    x = signal.samples if isinstance(signal, Signal) else np.asarray(signal, float)
    n = x.size
    pad = config.extension_factor * filt.half_length
    ext = _extend(x, pad)
    # the circular filter must fit in the extended buffer
    size = max(ext.size, filt.taps.size)
    if size > ext.size:
        ext = np.pad(ext, (0, size - ext.size), mode="symmetric")
    spec = np.fft.rfft(ext)
    what = filter_response(filt, size)
    keep = 1.0 - what
    crop = slice(pad, pad + n)

    cur = x.copy()
    steps = 0
    limit = iterations if iterations is not None else config.max_inner_iterations
    while steps < limit:
        spec = spec * keep
        nxt = np.fft.irfft(spec, size)[crop]
        steps += 1
        change = np.linalg.norm(cur - nxt)
        base = np.linalg.norm(cur)
        cur = nxt
        if iterations is None and (base == 0 or change <= config.delta * base):
            break
    if isinstance(signal, Signal):
        return signal.with_samples(cur), steps
    return cur, steps


def decompose(signal: Signal, config: FifConfig = FifConfig()) -> Decomposition:
    """Split ``signal`` into IMFs (highest frequency first) and a remainder."""
    if len(signal) < 16:
        raise SignalError("need at least 16 samples")
    x = signal.samples
    rem = x.copy()
    imfs, lengths, iters = [], [], []
    while len(imfs) < config.max_imfs:
        if count_extrema(rem) < 2:
            break
        if lengths and _exhausted(x, rem, lengths[-1], config.remainder_tol):
            break
        L = filter_length(rem, config.xi)
        filt = build_filter(L)
        imf, steps = sift(rem, filt, config)
        lengths.append(filt.half_length)
        iters.append(steps)
        log.debug("imf %d: L=%d, %d steps", len(imfs) + 1, filt.half_length, steps)
        imfs.append(signal.with_samples(imf))
        rem = rem - imf
    return Decomposition(imfs, signal.with_samples(rem), config, lengths, iters)


def _exhausted(x, rem, margin, tol) -> bool:
    if 2 * margin >= x.size // 2:
        margin = 0
    core = slice(margin, x.size - margin)
    scale = np.linalg.norm(x[core])
    return scale == 0 or np.linalg.norm(rem[core]) <= tol * scale


def imf_extrema_balance(imf, margin: int = 0) -> int:
    """``#maxima - #minima`` counting only extrema at least ``margin`` samples
    from either end."""
    x = imf.samples if isinstance(imf, Signal) else np.asarray(imf, float)
    mx, mn = local_extrema(x)
    lo, hi = margin, x.size - margin
    mx = mx[(mx >= lo) & (mx < hi)]
    mn = mn[(mn >= lo) & (mn < hi)]
    return int(mx.size - mn.size)


def with_xi(config: FifConfig, xi: float) -> FifConfig:
    return replace(config, xi=xi)

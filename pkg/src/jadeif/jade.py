"""Instantaneous phase and frequency by alignment to template half-sines.

The signal is cut at the zero crossings of a smoothed copy. Every section is
one half period; it is aligned by DTW to ``A sin(pi k / len)`` and the
inverted warping path gives the phase progress (0 to pi) through the
section. Sections are chained with ``pi`` offsets, a natural cubic spline
through the crossing points makes the phase differentiable, and its
derivative is the instantaneous frequency.

Phase is reported in the cosine convention: the oscillation is modelled as
``A(n) cos(phase(n)) + mean(n)``. Internally sample indices are the time
axis; the sampling period only enters when frequency is converted to Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import spline as sp
from .core import Signal, SignalError, local_extrema, moving_average
from .dtw import accumulate, dtw_cost, invert_path, optimal_path

MIN_SECTION = 4
AMP_GRID = 21
AMP_RANGE = (0.25, 1.5)
_GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class SectionModel:
    start_index: int
    end_index: int
    template_frequency: float  # rad / sample
    template_amplitude: float
    sign: int
    removed_mean: float

    @property
    def length(self) -> int:
        return self.end_index - self.start_index


@dataclass(frozen=True)
class PhaseCurve:
    values: np.ndarray  # splined phase, rad
    raw: np.ndarray  # concatenated DTW phase, NaN outside the analysed span
    spline: sp.CubicSpline
    sample_period: float


@dataclass(frozen=True)
class IFCurve:
    values: np.ndarray  # Hz


@dataclass(frozen=True)
class JadeResult:
    phase: PhaseCurve
    frequency: IFCurve
    sections: list
    amplitude_function: np.ndarray
    mean_function: np.ndarray
    crossings: np.ndarray  # integer section boundaries
    knots: np.ndarray  # spline partition points (sample units)
    knot_values: np.ndarray
    support: slice  # samples covered by the sections
    window: int
    config: "JadeConfig"
    notes: list = field(default_factory=list)

    def __len__(self):
        return self.phase.values.size


def _values(signal) -> np.ndarray:
    if isinstance(signal, Signal):
        return signal.samples
    return np.asarray(signal, dtype=float)


# -- segmentation -----------------------------------------------------------

def smoothing_window(signal) -> int:
    """Smallest odd moving-average window that removes a quarter of the energy.

    Capped at the largest odd integer not above ``len / 4``.
    """
    x = _values(signal)
    if x.size < 8:
        raise SignalError("need at least 8 samples")
    cap = int(x.size // 4)
    if cap % 2 == 0:
        cap -= 1
    cap = max(cap, 1)
    target = 0.75 * float(np.dot(x, x))
    c = np.concatenate(([0.0], np.cumsum(x)))
    idx = np.arange(x.size)
    for w in range(3, cap + 1, 2):
        h = w // 2
        lo = np.maximum(idx - h, 0)
        hi = np.minimum(idx + h + 1, x.size)
        y = (c[hi] - c[lo]) / (hi - lo)
        if np.dot(y, y) <= target:
            return w
    return cap


def _signs(x: np.ndarray) -> np.ndarray:
    s = np.sign(x)
    nz = np.flatnonzero(s)
    if nz.size == 0:
        return s
    # zeros take the sign of the preceding nonzero sample
    pos = np.maximum.accumulate(np.where(s != 0, np.arange(s.size), -1))
    pos[pos < 0] = nz[0]
    return s[pos]


def zero_crossings(signal, window: int | None = None) -> np.ndarray:
    """Indices ``z`` (sample after the change) where the smoothed signal
    changes sign."""
    x = _values(signal)
    w = smoothing_window(x) if window is None else window
    xs = moving_average(x, w)
    s = _signs(xs)
    z = np.flatnonzero(s[1:] != s[:-1]) + 1
    if z.size == 0:
        raise SignalError("no oscillation detected")
    return z


def refine_crossings(smoothed: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Sub-sample crossing positions by linear interpolation across ``z-1, z``."""
    z = np.asarray(z, dtype=int)
    out = z.astype(float)
    ok = z >= 1
    a = smoothed[z[ok] - 1]
    b = smoothed[z[ok]]
    den = a - b
    frac = np.where(den != 0, a / np.where(den != 0, den, 1.0), 1.0)
    out[ok] = z[ok] - 1 + np.clip(frac, 0.0, 1.0)
    return out


def prune_crossings(z: np.ndarray, min_length: int = MIN_SECTION) -> np.ndarray:
    """Drop crossings that bound sections shorter than ``min_length``.

    An interior short section loses both of its crossings, so it merges with
    both neighbours and section signs keep alternating.
    """
    z = list(np.asarray(z, dtype=int))
    while len(z) >= 2:
        lens = np.diff(z)
        i = int(np.argmin(lens))
        if lens[i] >= min_length:
            break
        if i == 0:
            del z[0]
        elif i == len(lens) - 1:
            del z[-1]
        else:
            del z[i : i + 2]
    return np.asarray(z, dtype=int)


def monotonic_boundaries(smoothed: np.ndarray) -> np.ndarray:
    mx, mn = local_extrema(smoothed)
    return np.sort(np.concatenate([mx, mn])).astype(int)


def _local_means(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Offset of each section, estimated over the full periods around it."""
    k = z.size - 1
    mu = np.zeros(k)
    if k < 2:
        return mu
    period_means = np.array([x[z[i] : z[i + 2]].mean() for i in range(k - 1)])
    for i in range(k):
        vals = []
        if i - 1 >= 0:
            vals.append(period_means[i - 1])
        if i < k - 1:
            vals.append(period_means[i])
        mu[i] = np.mean(vals)
    return mu


def split_sections(signal, crossings, monotonic: bool = False):
    """Cut ``signal`` at ``crossings``.

    Returns ``(models, blocks)``. Block ``i`` holds samples ``z_i .. z_{i+1}``
    inclusive, with the section's offset removed; the template for it runs
    over ``len(block)`` points from phase 0 to pi. Amplitudes are left at
    ``max |block|`` until fitted.
    """
    x = _values(signal)
    z = np.asarray(crossings, dtype=int)
    if z.size < 2:
        raise SignalError("need at least two crossings")
    if monotonic:
        mu = np.array([x[z[i] : z[i + 1] + 1].mean() for i in range(z.size - 1)])
    else:
        mu = _local_means(x, z)
    models, blocks = [], []
    for i in range(z.size - 1):
        block = x[z[i] : z[i + 1] + 1] - mu[i]
        if monotonic:
            sign = 1 if block[0] >= block[-1] else -1
        else:
            sign = 1 if block[:-1].sum() >= 0 else -1
        amp = float(np.max(np.abs(block)))
        models.append(SectionModel(int(z[i]), int(z[i + 1]), np.pi / (z[i + 1] - z[i]),
                                   amp, sign, float(mu[i])))
        blocks.append(block)
    return models, blocks


# -- per-section fitting ----------------------------------------------------

def template(length: int, amplitude: float, frequency: float, sign: int = 1,
             monotonic: bool = False) -> np.ndarray:
    k = np.arange(length)
    if monotonic:
        return sign * amplitude * np.cos(frequency * k)
    return sign * amplitude * np.sin(frequency * k)


def _dominant_sign(section: np.ndarray, monotonic: bool) -> int:
    if monotonic:
        return 1 if section[0] >= section[-1] else -1
    return 1 if section.sum() >= 0 else -1


def fit_template_amplitude(section, template_frequency: float, sign: int | None = None,
                           monotonic: bool = False) -> float:
    """Template amplitude with the lowest DTW cost against ``section``.

    A 21-point grid over ``[0.25, 1.5] * max|section|`` is followed by a
    golden-section search over the cells adjacent to the best grid point.
    """
    s = np.asarray(section, dtype=float)
    if s.size == 0:
        raise SignalError("empty section")
    M = float(np.max(np.abs(s)))
    if M == 0:
        raise SignalError("all-zero section")
    if sign is None:
        sign = _dominant_sign(s, monotonic)
    n = s.size

    def cost(a):
        return dtw_cost(s, template(n, a, template_frequency, sign, monotonic))

    # M * 1.0 is a grid point, so the result never loses to the naive max
    grid = M * np.linspace(AMP_RANGE[0], AMP_RANGE[1], AMP_GRID)
    costs = np.array([cost(a) for a in grid])
    b = int(np.argmin(costs))
    best_a, best_c = grid[b], costs[b]
    lo = grid[max(b - 1, 0)]
    hi = grid[min(b + 1, grid.size - 1)]
    c1 = hi - _GOLDEN * (hi - lo)
    c2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = cost(c1), cost(c2)
    for _ in range(24):
        if f1 <= f2:
            hi, c2, f2 = c2, c1, f1
            c1 = hi - _GOLDEN * (hi - lo)
            f1 = cost(c1)
        else:
            lo, c1, f1 = c1, c2, f2
            c2 = lo + _GOLDEN * (hi - lo)
            f2 = cost(c2)
    for a, c in ((c1, f1), (c2, f2)):
        if c < best_c:
            best_a, best_c = a, c
    return float(best_a)


def section_phase(section, model: SectionModel, monotonic: bool = False) -> np.ndarray:
    """Phase progress (0 .. pi) for every sample of an inclusive section block."""
    s = np.asarray(section, dtype=float)
    ref = template(s.size, model.template_amplitude, model.template_frequency,
                   model.sign, monotonic)
    path = optimal_path(accumulate(s, ref))
    return model.template_frequency * invert_path(path, s.size)


# -- full estimator ---------------------------------------------------------

def _spline_with_extension(knots: np.ndarray, values: np.ndarray, n: int):
    """Evaluate the spline (and its slope) on samples ``0..n-1``; outside the
    knot span the curve continues linearly with the end slope."""
    spl = sp.fit(knots, values)
    t = np.arange(n, dtype=float)
    lo, hi = spl.domain
    inside = (t >= lo) & (t <= hi)
    phase = np.empty(n)
    slope = np.empty(n)
    phase[inside] = sp.evaluate(spl, t[inside])
    slope[inside] = sp.derivative(spl, t[inside])
    d0 = sp.derivative(spl, lo)
    d1 = sp.derivative(spl, hi)
    left = t < lo
    right = t > hi
    phase[left] = values[0] + d0 * (t[left] - lo)
    slope[left] = d0
    phase[right] = values[-1] + d1 * (t[right] - hi)
    slope[right] = d1
    return spl, phase, slope


def _fill_piecewise(n: int, z: np.ndarray, vals) -> np.ndarray:
    out = np.empty(n)
    out[: z[0]] = vals[0]
    for i, v in enumerate(vals):
        out[z[i] : z[i + 1]] = v
    out[z[-1] :] = vals[-1]
    return out


@dataclass(frozen=True)
class JadeConfig:
    window: int | None = None  # moving-average window; estimated when None
    refine: bool = True  # sub-sample crossing positions for the spline knots
    # extra knots per section, as fractions of the half period, placed where
    # the DTW phase reaches them; () keeps the crossings only
    section_knots: tuple = (0.25, 0.75)
    monotonic: bool = False  # cut at extrema instead of zero crossings
    min_section: int = MIN_SECTION

    def __post_init__(self):
        if self.window is not None and (self.window < 1 or self.window % 2 == 0):
            raise ValueError("window must be a positive odd integer")
        if any(not 0 < f < 1 for f in self.section_knots):
            raise ValueError("section_knots must lie strictly inside (0, 1)")
        if list(self.section_knots) != sorted(set(self.section_knots)):
            raise ValueError("section_knots must be increasing")
        if self.min_section < 2:
            raise ValueError("min_section must be >= 2")


def _section_knots(local: np.ndarray, start: int, fractions) -> list:
    """Positions (samples) where a section's DTW phase reaches ``f * pi``."""
    out = []
    for f in fractions:
        t = f * np.pi
        j = int(np.searchsorted(local, t, side="left"))
        if j == 0 or j >= local.size:
            continue
        lo, hi = local[j - 1], local[j]
        frac = (t - lo) / (hi - lo) if hi > lo else 0.5
        out.append((start + j - 1 + frac, f))
    return out


def estimate(signal, config: JadeConfig = JadeConfig(), partition=None, crossings=None,
             sample_period: float | None = None) -> JadeResult:
    """Run the full estimator on a mono-component signal.

    Parameters
    ----------
    signal : Signal or array
    config : JadeConfig
    partition : optional spline partition points in samples (may be
        fractional) inside the analysed span. Knot values are read off the
        raw DTW phase by linear interpolation. Overrides the default knots.
    crossings : optional known crossing indices (sample after the sign
        change) that replace detection. Fractional values are taken as exact
        crossing positions.
    """
    x = _values(signal)
    if sample_period is None:
        sample_period = signal.sample_period if isinstance(signal, Signal) else 1.0
    n = x.size
    monotonic = config.monotonic
    w = smoothing_window(x) if config.window is None else int(config.window)
    xs = moving_average(x, w)
    notes = []

    exact = None
    if crossings is not None:
        c = np.asarray(crossings, dtype=float)
        if c.ndim != 1 or c.size < 2:
            raise SignalError("need at least two crossings")
        if np.any(c != np.round(c)):
            exact = c
            z = np.ceil(c).astype(int)
        else:
            z = c.astype(int)
        if np.any(np.diff(z) <= 0) or z[0] < 0 or z[-1] >= n:
            raise SignalError("crossings must be increasing sample indices")
    else:
        if monotonic:
            z = monotonic_boundaries(xs)
        else:
            s = _signs(xs)
            z = np.flatnonzero(s[1:] != s[:-1]) + 1
        z0 = z.size
        z = prune_crossings(z, config.min_section)
        if z.size < z0:
            notes.append(f"merged {z0 - z.size} boundaries of short sections")
    if z.size < 2:
        raise SignalError("no oscillation detected")

    models, blocks = split_sections(x, z, monotonic)
    if monotonic:
        phi0 = 0.0 if models[0].sign > 0 else np.pi
    else:
        phi0 = np.pi / 2 if models[0].sign < 0 else -np.pi / 2

    if exact is not None:
        bounds = exact
    elif config.refine and not monotonic:
        bounds = refine_crossings(xs, z)
    else:
        bounds = z.astype(float)

    fitted = []
    raw = np.full(n, np.nan)
    knots, knot_vals = [bounds[0]], [phi0]
    for i, (m, block) in enumerate(zip(models, blocks)):
        base = phi0 + i * np.pi
        if np.max(np.abs(block)) == 0:
            local = np.linspace(0.0, np.pi, block.size)
            m = SectionModel(m.start_index, m.end_index, m.template_frequency, 0.0, m.sign,
                             m.removed_mean)
        else:
            amp = fit_template_amplitude(block, m.template_frequency, m.sign, monotonic)
            m = SectionModel(m.start_index, m.end_index, m.template_frequency, amp, m.sign,
                             m.removed_mean)
            local = section_phase(block, m, monotonic)
        fitted.append(m)
        raw[m.start_index : m.end_index] = base + local[:-1]
        for pos, f in _section_knots(local, m.start_index, config.section_knots):
            # a knot must fall strictly between its section's boundaries
            if knots[-1] < pos < bounds[i + 1]:
                knots.append(pos)
                knot_vals.append(base + f * np.pi)
        knots.append(bounds[i + 1])
        knot_vals.append(base + np.pi)
    raw[z[-1]] = phi0 + (z.size - 1) * np.pi
    knots = np.asarray(knots)
    knot_vals = np.asarray(knot_vals)

    if partition is not None:
        knots = np.asarray(partition, dtype=float)
        if knots.ndim != 1 or knots.size < 2 or np.any(np.diff(knots) <= 0):
            raise SignalError("partition must be strictly increasing with >= 2 points")
        if knots[0] < z[0] or knots[-1] > z[-1]:
            raise SignalError("partition outside the analysed span")
        span = np.arange(z[0], z[-1] + 1)
        knot_vals = np.interp(knots, span, raw[z[0] : z[-1] + 1])

    spl, phase, slope = _spline_with_extension(knots, knot_vals, n)
    freq = slope / (2 * np.pi * sample_period)
    amps = [m.template_amplitude for m in fitted]
    means = [m.removed_mean for m in fitted]
    result = JadeResult(
        phase=PhaseCurve(phase, raw, spl, sample_period),
        frequency=IFCurve(freq),
        sections=fitted,
        amplitude_function=_fill_piecewise(n, z, amps),
        mean_function=_fill_piecewise(n, z, means),
        crossings=z,
        knots=knots,
        knot_values=knot_vals,
        support=slice(int(z[0]), int(z[-1]) + 1),
        window=w,
        config=config,
        notes=notes,
    )
    bad = monotonic_violations(result)
    if bad.size:
        notes.append(f"phase decreases at {bad.size} samples away from knots")
    return result


def reconstruct(result: JadeResult) -> np.ndarray:
    """``A(n) cos(phase(n)) + mean(n)`` from the splined phase."""
    return result.amplitude_function * np.cos(result.phase.values) + result.mean_function


def relative_error(estimate, truth, support: slice | None = None) -> float:
    """``||truth - estimate|| / ||truth||``, optionally over ``support`` only."""
    if isinstance(estimate, JadeResult):
        estimate = estimate.phase.values
    if isinstance(estimate, PhaseCurve):
        estimate = estimate.values
    est = np.asarray(estimate, dtype=float)
    ref = np.asarray(truth, dtype=float)
    if est.shape != ref.shape:
        raise ValueError("estimate and truth lengths differ")
    if support is not None:
        est, ref = est[support], ref[support]
    den = np.linalg.norm(ref)
    if den == 0:
        raise ValueError("truth has zero norm")
    return float(np.linalg.norm(ref - est) / den)


def check_separability(amplitude, phase, epsilon: float, spacing: float = 1.0) -> bool:
    """True when ``|A'|`` and ``|phi''|`` stay within ``epsilon |phi'|`` at all
    interior samples (central differences)."""
    a = np.asarray(amplitude, dtype=float)
    p = np.asarray(phase, dtype=float)
    if a.size < 3 or a.shape != p.shape:
        raise ValueError("need >= 3 samples of equal length")
    da = (a[2:] - a[:-2]) / (2 * spacing)
    dp = (p[2:] - p[:-2]) / (2 * spacing)
    d2p = (p[2:] - 2 * p[1:-1] + p[:-2]) / spacing**2
    bound = epsilon * np.abs(dp)
    return bool(np.all(np.abs(da) <= bound) and np.all(np.abs(d2p) <= bound))


def monotonic_violations(result: JadeResult, guard: float = 2.0, tol: float = 1e-9) -> np.ndarray:
    """Sample indices in the analysed span where the splined phase decreases,
    ignoring steps within ``guard`` samples of a partition point."""
    p = result.phase.values
    sup = result.support
    idx = np.arange(sup.start, sup.stop - 1)
    bad = idx[np.diff(p[sup]) < -tol]
    if bad.size == 0:
        return bad
    dist = np.min(np.abs(bad[:, None] + 0.5 - result.knots[None, :]), axis=1)
    return bad[dist > guard]


def truth_crossings(clean) -> np.ndarray:
    """Sign-change indices of a noiseless reference."""
    s = _signs(_values(clean))
    return np.flatnonzero(s[1:] != s[:-1]) + 1

"""Synthetic test signals with known phase, frequency and amplitude.

Phase values follow the cosine convention of each model: ``x = A cos(phase)``
for the chirp and AM-FM signals and ``x = A sin(phase)`` for the two
component signal, exactly as the models are written.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import NoiseSpec, Signal, add_noise

EX1_ALPHA = np.sqrt(5) / 1000
EX1_BETA = np.sqrt(2) / 300
EX1_GAMMA = 0.05
EX2_PARAMS = dict(A1=0.3, w1=1 / 35, A2=1.0, w2=1 / 100)
EX2_GAMMA = 0.05

# Samples per unit of the model's time variable n. The chirp's rate
# 2*alpha*n + beta exceeds pi rad per unit beyond n ~ 700, so integer n
# would alias; ten samples per unit keeps both examples well resolved.
DEFAULT_STEP = 0.1


@dataclass(frozen=True)
class GroundTruth:
    phase: np.ndarray
    frequency: np.ndarray  # Hz, i.e. cycles per unit of time
    amplitude: np.ndarray
    convention: str = "cos"

    def __post_init__(self):
        if not (self.phase.shape == self.frequency.shape == self.amplitude.shape):
            raise ValueError("ground truth arrays must share a length")

    def cos_phase(self) -> np.ndarray:
        """Phase such that the component equals ``amplitude * cos(phase)``."""
        if self.convention == "sin":
            return self.phase - np.pi / 2
        return self.phase


@dataclass(frozen=True)
class DuffingParams:
    alpha: float = -1.0
    beta: float = 1.0
    gamma: float = 0.1
    omega: float = 1.0
    x0: float = 1.0
    v0: float = 0.0
    t_end: float = 400.0
    dt: float = 0.01

    def __post_init__(self):
        if self.dt <= 0 or self.t_end <= 0:
            raise ValueError("dt and t_end must be positive")


def quadratic_chirp(n_samples=3000, alpha=EX1_ALPHA, beta=EX1_BETA,
                    noise: NoiseSpec = NoiseSpec(), step=DEFAULT_STEP):
    """``cos(alpha n^2 + beta n) + gamma xi_n`` on ``n = k * step``."""
    if n_samples < 16:
        raise ValueError("n_samples must be >= 16")
    n = step * np.arange(n_samples)
    phase = alpha * n**2 + beta * n
    freq = (2 * alpha * n + beta) / (2 * np.pi)
    clean = Signal(np.cos(phase), step)
    truth = GroundTruth(phase, freq, np.ones(n_samples))
    return add_noise(clean, noise), truth


def am_fm_signal(n_samples=3000, A1=0.3, w1=1 / 35, A2=1.0, w2=1 / 100,
                 noise: NoiseSpec = NoiseSpec(), step=DEFAULT_STEP):
    """``A1 cos(w1 n) cos(n + A2 cos(w2 n)) + gamma xi_n``."""
    if n_samples < 16:
        raise ValueError("n_samples must be >= 16")
    n = step * np.arange(n_samples)
    amp = A1 * np.cos(w1 * n)
    phase = n + A2 * np.cos(w2 * n)
    freq = (1 - A2 * w2 * np.sin(w2 * n)) / (2 * np.pi)
    clean = Signal(amp * np.cos(phase), step)
    return add_noise(clean, noise), GroundTruth(phase, freq, amp)


def two_component(n_samples=2000):
    """``0.2 sin(phi1) + 2 sin(phi2)`` on ``n`` in ``[0, 1]``.

    Returns the sum and the truths for the fast and slow component, in that
    order. Constant term of ``phi1`` is zero.
    """
    n = np.linspace(0.0, 1.0, n_samples)
    p1 = 2 * np.pi * (40 * n**3 - 60 * n**2 + 47 * n)
    p2 = 2 * np.pi * (0.1 * n**2 + n)
    f1 = 120 * n**2 - 120 * n + 47
    f2 = 0.2 * n + 1
    t1 = GroundTruth(p1, f1, np.full(n_samples, 0.2), "sin")
    t2 = GroundTruth(p2, f2, np.full(n_samples, 2.0), "sin")
    s = Signal(0.2 * np.sin(p1) + 2 * np.sin(p2), 1.0 / (n_samples - 1))
    return s, (t1, t2)


def two_component_parts(n_samples=2000):
    s, (t1, t2) = two_component(n_samples)
    return 0.2 * np.sin(t1.phase), 2 * np.sin(t2.phase)


def _duffing_rhs(p: DuffingParams):
    a, b, g, w = p.alpha, p.beta, p.gamma, p.omega

    def f(t, x, v):
        return v, g * np.cos(w * t) - a * x - b * x**3

    return f


def rk4(params: DuffingParams, dt: float):
    """Classical fourth-order Runge-Kutta on ``x' = v, v' = F(t, x)``."""
    f = _duffing_rhs(params)
    steps = int(round(params.t_end / dt))
    xs = np.empty(steps + 1)
    vs = np.empty(steps + 1)
    x, v = params.x0, params.v0
    xs[0], vs[0] = x, v
    h2 = dt / 2
    for k in range(steps):
        t = k * dt
        k1x, k1v = f(t, x, v)
        k2x, k2v = f(t + h2, x + h2 * k1x, v + h2 * k1v)
        k3x, k3v = f(t + h2, x + h2 * k2x, v + h2 * k2v)
        k4x, k4v = f(t + dt, x + dt * k3x, v + dt * k3v)
        x += dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v += dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        xs[k + 1], vs[k + 1] = x, v
    return xs, vs


def duffing_solve(params: DuffingParams = DuffingParams(), check: bool = True):
    """Integrate the forced Duffing oscillator; returns ``(x, xdot)`` signals.

    With ``check`` the run is repeated at ``dt / 2`` and the end states must
    agree to ``1e-4`` relative.
    """
    xs, vs = rk4(params, params.dt)
    if check:
        xh, vh = rk4(params, params.dt / 2)
        end = np.array([xs[-1], vs[-1]])
        ref = np.array([xh[-1], vh[-1]])
        if np.linalg.norm(end - ref) > 1e-4 * max(np.linalg.norm(ref), 1e-12):
            raise ValueError("dt too coarse")
    return Signal(xs, params.dt), Signal(vs, params.dt)


def duffing_energy(params: DuffingParams, x, v) -> np.ndarray:
    """``v^2/2 + alpha x^2/2 + beta x^4/4``; conserved when ``gamma = 0``."""
    x = np.asarray(x)
    v = np.asarray(v)
    return v**2 / 2 + params.alpha * x**2 / 2 + params.beta * x**4 / 4


FIXTURES = ("ex1", "ex2", "ex3", "duffing")


def fixture(name: str, noise: NoiseSpec | None = None, n_samples: int | None = None):
    """Named fixture: returns ``(signal, truth)``; truth is ``None`` for duffing."""
    if name == "ex1":
        noise = noise if noise is not None else NoiseSpec(EX1_GAMMA, 0)
        return quadratic_chirp(n_samples or 3000, noise=noise)
    if name == "ex2":
        noise = noise if noise is not None else NoiseSpec(EX2_GAMMA, 0)
        return am_fm_signal(n_samples or 3000, noise=noise, **EX2_PARAMS)
    if name == "ex3":
        s, truths = two_component(n_samples or 2000)
        if noise is not None:
            s = add_noise(s, noise)
        return s, truths
    if name == "duffing":
        _, v = duffing_solve(DuffingParams())
        if noise is not None:
            v = add_noise(v, noise)
        return v, None
    raise KeyError(f"unknown fixture {name!r}")

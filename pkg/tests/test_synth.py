import numpy as np
import pytest

from jadeif import synth
from jadeif.core import NoiseSpec


def fd_frequency(phase, dt):
    return np.gradient(phase, dt)[1:-1] / (2 * np.pi)


def test_chirp_degenerate_is_constant():
    s, truth = synth.quadratic_chirp(100, alpha=0.0, beta=0.0)
    np.testing.assert_array_equal(s.samples, np.ones(100))
    noisy, _ = synth.quadratic_chirp(100, alpha=0.0, beta=0.0, noise=NoiseSpec(0.1, 1))
    assert np.std(noisy.samples - 1) == pytest.approx(0.1, rel=0.3)


@pytest.mark.parametrize("make", [
    lambda: synth.quadratic_chirp(noise=NoiseSpec(0.0)),
    lambda: synth.am_fm_signal(noise=NoiseSpec(0.0)),
])
def test_truth_frequency_is_phase_derivative(make):
    s, truth = make()
    fd = fd_frequency(truth.phase, s.sample_period)
    np.testing.assert_allclose(fd, truth.frequency[1:-1], rtol=1e-6, atol=1e-9)
    np.testing.assert_allclose(s.samples, truth.amplitude * np.cos(truth.phase), atol=1e-12)


def test_chirp_truth_values():
    s, truth = synth.quadratic_chirp(noise=NoiseSpec(0.0))
    n = s.times
    np.testing.assert_allclose(truth.phase, synth.EX1_ALPHA * n**2 + synth.EX1_BETA * n)
    np.testing.assert_allclose(truth.frequency, (2 * synth.EX1_ALPHA * n + synth.EX1_BETA) / (2 * np.pi))


def test_am_fm_without_modulation_is_unit_tone():
    s, truth = synth.am_fm_signal(500, A1=1.0, w1=0.0, A2=0.0)
    np.testing.assert_allclose(truth.phase, s.times)
    np.testing.assert_allclose(s.samples, np.cos(s.times))


def test_example2_truth_phase():
    s, truth = synth.fixture("ex2", noise=NoiseSpec(0.0))
    n = s.times
    np.testing.assert_allclose(truth.phase, n + np.cos(n / 100))


def test_two_component():
    s, (t1, t2) = synth.two_component()
    assert s.samples[0] == 0.0
    assert t2.amplitude[0] / t1.amplitude[0] == pytest.approx(10.0)
    n = np.linspace(0, 1, 2000)
    np.testing.assert_allclose(t1.frequency, 120 * n**2 - 120 * n + 47)
    for t in (t1, t2):
        fd = fd_frequency(t.phase, s.sample_period)
        np.testing.assert_allclose(fd, t.frequency[1:-1], rtol=1e-6)
    a, b = synth.two_component_parts()
    np.testing.assert_allclose(a + b, s.samples)
    # the cosine-convention phase reproduces the sine components
    np.testing.assert_allclose(t1.amplitude * np.cos(t1.cos_phase()), a, atol=1e-12)


def test_generators_are_deterministic():
    a, _ = synth.fixture("ex1", NoiseSpec(0.05, 11))
    b, _ = synth.fixture("ex1", NoiseSpec(0.05, 11))
    assert np.array_equal(a.samples, b.samples)


def test_linear_oscillator_closed_form():
    p = synth.DuffingParams(alpha=1.0, beta=0.0, gamma=0.0, x0=1.0, v0=0.0,
                            t_end=20 * np.pi, dt=0.01)
    x, v = synth.duffing_solve(p)
    np.testing.assert_allclose(x.samples, np.cos(x.times), atol=1e-6)
    np.testing.assert_allclose(v.samples, -np.sin(x.times), atol=1e-6)


def rk4_order(dts=(0.1, 0.05, 0.025, 0.0125)):
    p = synth.DuffingParams(alpha=1.0, beta=0.0, gamma=0.0, x0=1.0, v0=0.0, t_end=10.0, dt=0.1)
    errs = []
    for dt in dts:
        x, _ = synth.rk4(p, dt)
        errs.append(abs(x[-1] - np.cos(p.t_end)))
    return np.polyfit(np.log(dts), np.log(errs), 1)[0]


def test_rk4_is_fourth_order():
    assert abs(rk4_order() - 4.0) < 0.3


def energy_drift():
    p = synth.DuffingParams(alpha=-1.0, beta=1.0, gamma=0.0, x0=1.5, v0=0.0, t_end=100.0, dt=0.01)
    x, v = synth.duffing_solve(p, check=False)
    e = synth.duffing_energy(p, x.samples, v.samples)
    return np.max(np.abs(e - e[0])) / abs(e[0])


def test_conservative_energy_drift():
    assert energy_drift() < 1e-6


def test_default_duffing_is_bounded_oscillation():
    x, v = synth.duffing_solve(synth.DuffingParams(t_end=100.0))
    assert np.max(np.abs(v.samples)) < 1.0
    crossings = np.sum(np.diff(np.sign(v.samples)) != 0)
    assert crossings > 20


def test_coarse_step_rejected():
    with pytest.raises(ValueError, match="dt too coarse"):
        synth.duffing_solve(synth.DuffingParams(t_end=50.0, dt=0.5))
    with pytest.raises(ValueError):
        synth.DuffingParams(dt=0.0)


def test_unknown_fixture():
    with pytest.raises(KeyError):
        synth.fixture("nope")

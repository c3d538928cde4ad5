"""End-to-end acceptance criteria, one test each.

Every test records a PASS or FAIL line with its measured numbers; the lines
are printed in the pytest terminal summary.
"""

import functools
import sys
import time

import numpy as np

from jadeif import bench, dtw, fif, fileio, jade, synth
from jadeif.core import NoiseSpec, relative_l2

from .test_dtw import all_paths
from .test_synth import energy_drift, rk4_order

RESULTS = {}

PROPERTY_SUITES = ("test_spline.py", "test_baselines.py", "test_core.py", "test_dtw.py",
                   "test_fif.py", "test_synth.py", "test_jade.py")


def record(number, title, ok, detail):
    RESULTS[number] = f"{'PASS' if ok else 'FAIL'} [{number}] {title}: {detail}"
    assert ok, RESULTS[number]


def summary_lines():
    return [RESULTS[k] for k in sorted(RESULTS)]


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_1_table1_replica():
    with Timer() as tm:
        rep = bench.snr_sweep("ex1", bench.TABLE1_SNR, seeds=10, ground_truth_crossings=True)
    med = rep.medians()
    ref = np.array(bench.TABLE1_EPS)
    ratio = med / ref
    within = bool(np.all((ratio >= 0.1) & (ratio <= 10.0)))
    monotone = bool(np.all(np.diff(med) >= 0))
    detail = ("medians " + " ".join(f"{m:.2e}" for m in med)
              + f"; ratio to reference {ratio.min():.2f}..{ratio.max():.2f}; {tm.elapsed:.1f}s")
    record(1, "SNR sweep on the chirp", within and monotone and tm.elapsed < 60, detail)


def test_2_example2_accuracy():
    with Timer() as tm:
        s, truth = synth.fixture("ex2")
        out = bench.compare_methods(s, truth.cos_phase())
    eps = {k: v.epsilon for k, v in out.items()}
    ok = (eps["jade"] <= 0.08 and all(eps["jade"] < eps[m] for m in ("ht", "nht", "dq"))
          and tm.elapsed < 10)
    detail = ", ".join(f"{k} {v:.3g}" for k, v in eps.items()) + f"; {tm.elapsed:.1f}s"
    record(2, "AM-FM phase accuracy", ok, detail)


@functools.lru_cache(maxsize=None)
def _paths(n, m):
    return [np.array(p) for p in all_paths(n, m)]


def _enumerate(x, y):
    # sequential sums, the same order the accumulator adds terms
    best, arg = np.inf, []
    for p in _paths(len(x), len(y)):
        c = 0.0
        for i, j in p:
            c += abs(x[i] - y[j])
        if c < best:
            best, arg = c, [p]
        elif c == best:
            arg.append(p)
    return best, arg


def test_3_dtw_oracle():
    rng = np.random.default_rng(2024)
    mismatches = 0
    with Timer() as tm:
        for _ in range(1000):
            x = rng.normal(size=rng.integers(1, 7))
            y = rng.normal(size=rng.integers(1, 7))
            best, arg = _enumerate(x, y)
            D = dtw.accumulate(x, y)
            p = dtw.optimal_path(D)
            if D.total != best or not any(np.array_equal(p.pairs, a) for a in arg):
                mismatches += 1
    record(3, "DTW against exhaustive enumeration", mismatches == 0 and tm.elapsed < 10,
           f"{mismatches} mismatches in 1000 pairs; {tm.elapsed:.1f}s")


def test_4_fif_additivity_and_shape():
    worst_err, worst_bal = 0.0, 0
    with Timer() as tm:
        for name in synth.FIXTURES:
            s, _ = synth.fixture(name)
            d = fif.decompose(s)
            worst_err = max(worst_err, relative_l2(d.reconstruction(), s.samples))
            for imf, L in zip(d.imfs, d.filter_lengths):
                worst_bal = max(worst_bal, abs(fif.imf_extrema_balance(imf, L)))
    ok = worst_err <= 1e-8 and worst_bal <= 1 and tm.elapsed < 30
    record(4, "FIF additivity and IMF shape", ok,
           f"max reconstruction error {worst_err:.1e}, max extrema imbalance {worst_bal}; {tm.elapsed:.1f}s")


def test_5_two_component_pipeline():
    with Timer() as tm:
        s, truths = synth.two_component()
        d = fif.decompose(s)
        eps = []
        for imf, t in zip(d.imfs, truths):
            r = jade.estimate(imf)
            eps.append(jade.relative_error(r, t.cos_phase(), r.support))
    ok = len(d.imfs) == 2 and all(e < 0.05 for e in eps) and tm.elapsed < 20
    record(5, "two-component decomposition and phase", ok,
           f"{len(d.imfs)} IMFs, eps " + " ".join(f"{e:.3g}" for e in eps) + f"; {tm.elapsed:.1f}s")


def test_6_duffing_round_trip():
    with Timer() as tm:
        v, _ = synth.fixture("duffing")
        res = bench.pipeline(v)
    ok = res.composite_correlation > 0.9 and tm.elapsed < 30
    record(6, "Duffing composite reconstruction", ok,
           f"interior correlation {res.composite_correlation:.4f}, {len(res.estimated)} IMFs; "
           f"{tm.elapsed:.1f}s")


def test_7_external_waveform_sweep(tmp_path):
    clean, truth = synth.fixture("ex1", noise=NoiseSpec(0.0))
    path = tmp_path / "waveform.csv"
    fileio.write_table({"time": clean.times, "value": clean.samples, "phase": truth.cos_phase()}, path)
    with Timer() as tm:
        rep = bench.snr_sweep(str(path), bench.TABLE2_SNR, seeds=10, ground_truth_crossings=True)
    med = rep.medians()
    ok = bool(np.all(np.diff(med) >= 0)) and tm.elapsed < 60
    record(7, "sweep on an external waveform file", ok,
           "medians " + " ".join(f"{m:.2e}" for m in med) + f"; {tm.elapsed:.1f}s")


def test_8_property_suites():
    import pathlib
    import subprocess

    here = pathlib.Path(__file__).parent
    files = [str(here / f) for f in PROPERTY_SUITES]
    with Timer() as tm:
        r = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *files],
                           capture_output=True, text=True, cwd=here.parent)
    tail = r.stdout.strip().splitlines()[-1] if r.stdout.strip() else r.stderr.strip()[-200:]
    record(8, "property suites", r.returncode == 0 and tm.elapsed < 30, f"{tail}; {tm.elapsed:.1f}s")


def test_9_integrator_convergence():
    with Timer() as tm:
        slope = rk4_order()
        drift = energy_drift()
    ok = abs(slope - 4.0) <= 0.3 and drift < 1e-6 and tm.elapsed < 5
    record(9, "RK4 convergence and energy", ok,
           f"order slope {slope:.2f}, relative energy drift {drift:.1e}; {tm.elapsed:.1f}s")


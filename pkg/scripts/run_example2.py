"""Phase error of JADE, HT, NHT and DQ on the noisy AM-FM fixture."""

import argparse

import numpy as np

from jadeif import bench, synth
from jadeif.core import NoiseSpec
from jadeif.plot import emit_plot


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--plot", help="write an SVG of the wrapped phase curves")
    args = ap.parse_args()
    s, truth = synth.fixture("ex2", noise=NoiseSpec(synth.EX2_GAMMA, args.seed))
    out = bench.compare_methods(s, truth.cos_phase())
    for name, o in out.items():
        print(f"{name:>5}  eps={o.epsilon:.4g}" + (f"  ({o.error})" if o.error else ""))
    if args.plot:
        def wrap(p):
            return np.angle(np.exp(1j * p))

        panels = [{"truth": wrap(truth.cos_phase())}]
        panels += [{k: wrap(o.phase)} for k, o in out.items() if o.phase is not None]
        emit_plot(panels, args.plot, s.times, "wrapped phase")


if __name__ == "__main__":
    main()

"""Decompose the Duffing velocity, estimate each IMF and report the composite fit."""

import argparse

from jadeif import bench, synth
from jadeif.plot import emit_plot


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--plot", help="write an SVG of input, IMFs and composite")
    args = ap.parse_args()
    v, _ = synth.fixture("duffing")
    res = bench.pipeline(v)
    print(f"IMFs: {len(res.decomposition.imfs)}, estimated: {[i + 1 for i in res.estimated]}")
    for i, e in zip(res.estimated, res.imf_errors):
        print(f"  imf {i + 1}: reconstruction relative error {e:.4f}")
    print(f"composite correlation {res.composite_correlation:.4f}, "
          f"relative error {res.composite_error:.4f}")
    for note in res.notes:
        print("note:", note)
    if args.plot:
        panels = [{"input": v.samples, "composite": res.composite}]
        panels += [{f"imf {i + 1}": imf.samples} for i, imf in enumerate(res.decomposition.imfs)]
        emit_plot(panels, args.plot, v.times, "Duffing velocity")


if __name__ == "__main__":
    main()

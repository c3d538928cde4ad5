"""SNR sweep of JADE phase error on the chirp, printed next to the reference row."""

import argparse

from jadeif import bench


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--detected-crossings", action="store_true",
                    help="detect crossings on the noisy signal instead of using the clean ones")
    args = ap.parse_args()
    rep = bench.snr_sweep("ex1", bench.TABLE1_SNR, args.seeds,
                          ground_truth_crossings=not args.detected_crossings)
    print(f"{'snr_db':>8}  {'eps_median':>11}  {'eps_iqr':>10}  {'reference':>10}")
    for row, ref in zip(rep.rows, bench.TABLE1_EPS):
        print(f"{row.snr_db:8.2f}  {row.epsilon_median:11.3e}  {row.epsilon_iqr:10.3e}  {ref:10.1e}")


if __name__ == "__main__":
    main()

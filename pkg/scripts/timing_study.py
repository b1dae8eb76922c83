"""Fit and predict time of CIBer relative to Naive Bayes as feature pairs grow.

Example:
    python3 scripts/timing_study.py --lambdas 1,2,3,4,5 --n 50000 --out timing.csv
"""

import argparse

from ciber.bench import linear_fit_r2, time_ratio, write_summary_json, write_timing_csv
from ciber.classifier import FitConfig
from ciber.simulate import SegmentSpec


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lambdas", default="1,2,3,4,5")
    ap.add_argument("--n", type=int, default=50000, help="rows per class")
    ap.add_argument("--bins", type=int, default=1000)
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    lambdas = [int(v) for v in args.lambdas.split(",")]
    pts = time_ratio([SegmentSpec(n_per_class=args.n, n_pairs=lam) for lam in lambdas],
                     repeats=args.repeats, seed=args.seed, config=FitConfig(bins=args.bins))
    for p in pts:
        print(f"lambda {p.n_pairs}  train {p.train_mean:6.2f} +/- {p.train_half_width:.2f}"
              f"  test {p.test_mean:5.2f} +/- {p.test_half_width:.2f}")
    r2 = linear_fit_r2(lambdas, [p.train_mean for p in pts])
    print(f"linear fit R^2 of train ratio: {r2:.3f}")
    if args.out:
        write_timing_csv(pts, args.out)
        write_summary_json(pts, args.out + ".json", experiment="timing", train_ratio_linear_r2=r2)


if __name__ == "__main__":
    main()

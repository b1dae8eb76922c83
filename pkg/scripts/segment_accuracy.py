"""Accuracy of CIBer and Naive Bayes on the crossing-segments data over many seeds.

Example:
    python3 scripts/segment_accuracy.py --seeds 20 --bins 1000 --curve-out curve.csv
"""

import argparse
import logging

import numpy as np

from ciber import classifier
from ciber.bench import default_models, error_curve, t_ci, write_curve_csv, write_summary_json
from ciber.classifier import FitConfig, log_joint
from ciber.data import stratified_split
from ciber.simulate import SegmentSpec, gen_segments

log = logging.getLogger("segment_accuracy")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--n", type=int, default=5000, help="rows per class")
    ap.add_argument("--bins", type=int, default=1000)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--test-fraction", type=float, default=0.2)
    ap.add_argument("--curve-out", help="also write an error curve (first seed) to this CSV")
    ap.add_argument("--repeats", type=int, default=10)
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    config = FitConfig(bins=args.bins, alpha=args.alpha)
    acc_c, acc_nb, ties = [], [], []
    for seed in range(args.seeds):
        train, test = stratified_split(gen_segments(SegmentSpec(n_per_class=args.n, seed=seed)),
                                       args.test_fraction, seed)
        m = classifier.fit(train, config)
        s = log_joint(m, test.X)
        acc_c.append(np.mean(s.argmax(1) == test.y))
        acc_nb.append(np.mean(log_joint(m, test.X, independent=True).argmax(1) == test.y))
        ties.append(np.mean(s[:, 0] == s[:, 1]))
        log.info("seed %2d  ciber %.4f  nb %.4f  tied %.4f  groups %s",
                 seed, acc_c[-1], acc_nb[-1], ties[-1], m.partition.groups)
    for name, acc in (("ciber", acc_c), ("nb", acc_nb)):
        mean, half = t_ci(acc) if len(acc) > 1 else (acc[0], 0.0)
        print(f"{name:5s} accuracy {mean:.4f} +/- {half:.4f}")
    print(f"tied test rows {np.mean(ties):.4f}")

    if args.curve_out:
        train, test = stratified_split(gen_segments(SegmentSpec(n_per_class=args.n, seed=0)),
                                       args.test_fraction, 0)
        fractions = [round(f, 1) for f in np.arange(0.1, 1.01, 0.1)]
        pts = error_curve(train, test, default_models(config), fractions, args.repeats, 0)
        write_curve_csv(pts, args.curve_out)
        write_summary_json(pts, args.curve_out + ".json", experiment="error_curve", bins=args.bins)


if __name__ == "__main__":
    main()

"""Command-line interface: ``ciber {train,predict,eval,simulate,bench-time,inspect}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import bench, classifier
from .classifier import FitConfig
from .data import FeatureType, load_csv, read_features, stratified_split, write_csv
from .errors import CiberError
from .simulate import SegmentSpec, gen_segments

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

# every random stage draws from its own stream derived from --seed
STAGES = {"simulate": 0, "rebalance": 1, "split": 2, "curve": 3, "timing": 4}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _bins(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("must be an integer >= 2")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _alpha(text: str) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _unit(text: str) -> float:
    v = float(text)
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return v


def _fraction(text: str) -> float:
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError("must lie in (0, 1]")
    return v


def _open_fraction(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("must lie in (0, 1)")
    return v


def _list_of(conv):
    def parse(text: str):
        try:
            return [conv(t) for t in text.split(",") if t.strip()]
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc

    return parse


def _type_override(text: str) -> tuple[str, FeatureType]:
    name, sep, kind = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected NAME=TYPE")
    try:
        return name, FeatureType(kind)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"TYPE must be one of {[t.value for t in FeatureType]}"
        ) from exc


def _default_seed() -> int:
    try:
        return int(os.environ.get("CIBER_SEED", "0"))
    except ValueError:
        return 0


def _model_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--discretizer", choices=("equal_width", "mean_sigma", "mdlp"), default="equal_width")
    p.add_argument("--bins", type=_bins, default=10)
    p.add_argument("--alpha", type=_alpha, default=1.0)
    p.add_argument("--threshold", type=_unit, default=0.2)
    p.add_argument("--rebalance", choices=("over", "under"), default=None)


def _data_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", help="training CSV")
    p.add_argument("--target", default="y", help="name of the label column")
    p.add_argument("--type", dest="types", action="append", type=_type_override, default=[],
                   metavar="NAME=TYPE", help="force a column's feature type")
    p.add_argument("--max-categories", type=_positive_int, default=20)
    p.add_argument("--on-missing", choices=("drop", "error"), default="drop")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override its values")
    common.add_argument("--seed", type=int, default=_default_seed())

    parser = _Parser(prog="ciber", description="Comonotone-independence Bayesian classifier")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("train", parents=[common], help="fit a model on a CSV")
    _data_options(p)
    _model_options(p)
    p.add_argument("--out", help="model file to write")

    p = sub.add_parser("predict", parents=[common], help="posteriors for every row of a CSV")
    p.add_argument("--model")
    p.add_argument("--data")
    p.add_argument("--out", help="predictions CSV (default: standard output)")

    p = sub.add_parser("eval", parents=[common], help="error-rate curves over training fractions")
    _data_options(p)
    _model_options(p)
    p.add_argument("--test-data", help="separate test CSV; otherwise a stratified split of --data")
    p.add_argument("--test-fraction", type=_open_fraction, default=0.3)
    p.add_argument("--fractions", type=_list_of(_fraction), default=[0.1 * k for k in range(1, 11)])
    p.add_argument("--repeats", type=_bins, default=10)
    p.add_argument("--models", type=_list_of(str), default=["ciber", "nb"])
    p.add_argument("--out", help="results CSV")
    p.add_argument("--json", help="JSON summary")

    p = sub.add_parser("simulate", parents=[common], help="write two-segment synthetic data")
    p.add_argument("--lambda", dest="n_pairs", type=_positive_int, default=1)
    p.add_argument("--n", type=_positive_int, default=5000, help="rows per class")
    p.add_argument("--offset", type=float, default=20.0)
    p.add_argument("--noise", type=_alpha, default=0.0)
    p.add_argument("--target", default="y")
    p.add_argument("--out")

    p = sub.add_parser("bench-time", parents=[common], help="CIBer / Naive Bayes running-time ratios")
    p.add_argument("--lambdas", type=_list_of(_positive_int), default=[1, 2, 3, 4, 5])
    p.add_argument("--n", type=_positive_int, default=50000, help="rows per class")
    _model_options(p)
    p.set_defaults(bins=1000)
    p.add_argument("--repeats", type=_bins, default=10)
    p.add_argument("--out", help="results CSV")
    p.add_argument("--json", help="JSON summary")

    p = sub.add_parser("inspect", parents=[common], help="print a model's priors and partition")
    p.add_argument("--model")
    return parser


def _read_config(path: str) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _parse(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    pre = _Parser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config and known.command:
        sub = parser._subparsers._group_actions[0].choices.get(known.command)
        if sub is not None:
            try:
                values = _read_config(known.config)
            except OSError as exc:
                raise UsageError(f"cannot read config file: {exc}") from exc
            dests = {a.dest for a in sub._actions}
            unknown = sorted(set(values) - dests)
            if unknown:
                raise UsageError(f"{known.config}: unknown key(s) {unknown}")
            sub.set_defaults(**values)
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError(parser.format_usage() + "ciber: error: a subcommand is required")
    # string defaults from a config file for list options bypass their type
    for key in ("fractions", "models", "lambdas"):
        value = getattr(args, key, None)
        if isinstance(value, str):
            conv = {"fractions": _fraction, "models": str, "lambdas": _positive_int}[key]
            try:
                setattr(args, key, _list_of(conv)(value))
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"{key}: {exc}") from exc
    return args


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n, None) in (None, "")]
    if missing:
        sub = build_parser()._subparsers._group_actions[0].choices[args.command]
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"{sub.format_usage()}{sub.prog}: error: missing required {flags}")


def _fit_config(args: argparse.Namespace) -> FitConfig:
    return FitConfig(
        discretizer=args.discretizer,
        bins=args.bins,
        alpha=args.alpha,
        threshold=args.threshold,
        rebalance=args.rebalance,
        seed=bench.sub_seed(args.seed, STAGES["rebalance"]),
    )


def _load(args: argparse.Namespace, path: str):
    return load_csv(path, args.target, dict(args.types), args.max_categories, args.on_missing)


def cmd_train(args: argparse.Namespace) -> int:
    _require(args, "data", "out")
    model = classifier.fit(_load(args, args.data), _fit_config(args))
    classifier.save(model, args.out)
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    _require(args, "model", "data")
    model = classifier.load(args.model)
    X = read_features(args.data, model.column_names, model.categories)
    proba = classifier.predict_proba(model, X)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "prediction", *(f"p_{c}" for c in model.class_names)])
    for r, p in enumerate(proba):
        w.writerow([r, model.class_names[int(p.argmax())], *(repr(float(v)) for v in p)])
    if args.out:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    _require(args, "data")
    if not args.out and not args.json:
        raise UsageError("eval: give --out and/or --json")
    ds = _load(args, args.data)
    if args.test_data:
        train, test = ds, _load(args, args.test_data)
        if test.column_names != train.column_names or test.class_names != train.class_names:
            raise CiberError("test data columns or classes differ from training data")
    else:
        train, test = stratified_split(ds, args.test_fraction, bench.sub_seed(args.seed, STAGES["split"]))
    available = bench.default_models(_fit_config(args))
    unknown = [m for m in args.models if m not in available]
    if unknown:
        raise UsageError(f"eval: unknown model(s) {unknown}; choose from {sorted(available)}")
    models = {m: available[m] for m in args.models}
    points = bench.error_curve(
        train, test, models, args.fractions, args.repeats, bench.sub_seed(args.seed, STAGES["curve"])
    )
    if args.out:
        bench.write_curve_csv(points, args.out)
    if args.json:
        bench.write_summary_json(points, args.json, experiment="error_curve", seed=args.seed,
                                 config=vars(_fit_config(args)))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    _require(args, "out")
    spec = SegmentSpec(
        n_per_class=args.n,
        n_pairs=args.n_pairs,
        offset=args.offset,
        noise=args.noise,
        seed=bench.sub_seed(args.seed, STAGES["simulate"]),
    )
    write_csv(gen_segments(spec), args.out, args.target)
    return EXIT_OK


def cmd_bench_time(args: argparse.Namespace) -> int:
    _require(args, "out")
    specs = [SegmentSpec(n_per_class=args.n, n_pairs=lam) for lam in args.lambdas]
    points = bench.time_ratio(
        specs, args.repeats, bench.sub_seed(args.seed, STAGES["timing"]), _fit_config(args)
    )
    bench.write_timing_csv(points, args.out)
    if args.json:
        r2 = bench.linear_fit_r2([p.n_pairs for p in points], [p.train_mean for p in points]) \
            if len(points) > 1 else None
        bench.write_summary_json(points, args.json, experiment="time_ratio", seed=args.seed,
                                 train_ratio_linear_r2=r2)
    return EXIT_OK


def render_model(model: classifier.CiberModel) -> str:
    lines = [f"classes: {len(model.class_names)}"]
    for name, p in zip(model.class_names, model.priors):
        lines.append(f"  {name}: prior {p:.6g}")
    lines.append(f"features: {model.n_features}  alpha: {model.alpha:g}  "
                 f"discretizer: {model.config.discretizer} (bins {model.config.bins})")
    for j, (name, ftype, e) in enumerate(zip(model.column_names, model.feature_types, model.edges)):
        lines.append(f"  [{j}] {name}: {ftype.value}, {e.scheme}, {e.n_bins} bins")
    part = model.partition
    lines.append(f"partition (threshold {part.threshold:g}): "
                 f"{len(part.clusters)} comonotone group(s), {len(part.independent)} independent")
    for g in part.groups:
        kind = "comonotone" if len(g) > 1 else "independent"
        lines.append(f"  {kind}: {', '.join(model.column_names[i] for i in g)}")
    for m in part.merges:
        lines.append(f"  merged {list(m.left)} + {list(m.right)} at distance {m.distance:.4f}")
    return "\n".join(lines) + "\n"


def cmd_inspect(args: argparse.Namespace) -> int:
    _require(args, "model")
    sys.stdout.write(render_model(classifier.load(args.model)))
    return EXIT_OK


COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
    "simulate": cmd_simulate,
    "bench-time": cmd_bench_time,
    "inspect": cmd_inspect,
}


def dispatch(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr, format="ciber: %(message)s")
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc).rstrip("\n"), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (CiberError, OSError, ValueError) as exc:
        print(f"ciber: error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(dispatch())

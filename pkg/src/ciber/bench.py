"""Repeated subsample-fit-test evaluation, t confidence intervals and timing ratios."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Protocol, Sequence

import numpy as np

from .classifier import CIBer, FitConfig, NaiveBayes
from .data import Dataset, stratified_split, subsample_fraction
from .errors import TooFewRepeats
from .simulate import SegmentSpec, gen_segments

# two-tailed 95% Student t quantiles t_{0.975, df}, df = 1..29
T_975 = (
    12.7062, 4.3027, 3.1824, 2.7764, 2.5706, 2.4469, 2.3646, 2.3060, 2.2622, 2.2281,
    2.2010, 2.1788, 2.1604, 2.1448, 2.1314, 2.1199, 2.1098, 2.1009, 2.0930, 2.0860,
    2.0796, 2.0739, 2.0687, 2.0639, 2.0595, 2.0555, 2.0518, 2.0484, 2.0452,
)


class Classifier(Protocol):
    def fit(self, ds: Dataset) -> "Classifier": ...

    def predict(self, X) -> np.ndarray: ...


def t_quantile(repeats: int) -> float:
    if repeats < 2:
        raise TooFewRepeats(f"need at least 2 repeats, got {repeats}")
    if repeats - 1 <= len(T_975):
        return T_975[repeats - 2]
    from scipy import stats

    return float(stats.t.ppf(0.975, repeats - 1))


def t_ci(values) -> tuple[float, float]:
    """(mean, half-width) of the 95% t interval: t * s / sqrt(r), s with divisor r - 1."""
    v = np.asarray(values, dtype=float).reshape(-1)
    q = t_quantile(v.size)
    if np.all(v == v[0]):
        return float(v[0]), 0.0
    return float(v.mean()), q * float(v.std(ddof=1)) / math.sqrt(v.size)


def sub_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


@dataclass(frozen=True)
class CurvePoint:
    train_fraction: float
    model: str
    mean: float
    std: float
    half_width: float
    repeats: int
    accuracy: float
    errors: tuple[float, ...] = field(default=(), repr=False)

    @property
    def ci_low(self) -> float:
        return self.mean - self.half_width

    @property
    def ci_high(self) -> float:
        return self.mean + self.half_width


def error_rate(y_true, y_pred) -> float:
    y_true = np.asarray(y_true)
    return float(np.count_nonzero(y_true != np.asarray(y_pred)) / y_true.size)


def default_models(config: FitConfig | None = None) -> dict[str, Callable[[], Classifier]]:
    config = config or FitConfig()
    return {"ciber": lambda: CIBer(config), "nb": lambda: NaiveBayes(config)}


def error_curve(
    train: Dataset,
    test: Dataset,
    models: Mapping[str, Callable[[], Classifier]],
    fractions: Sequence[float],
    repeats: int = 10,
    seed: int = 0,
) -> list[CurvePoint]:
    """Test error of each model trained on growing stratified subsamples of ``train``."""
    fractions = [float(f) for f in fractions]
    if any(not 0 < f <= 1 for f in fractions) or fractions != sorted(fractions):
        raise ValueError("fractions must be ascending within (0, 1]")
    if repeats < 2:
        raise TooFewRepeats(f"need at least 2 repeats, got {repeats}")
    points = []
    for fi, f in enumerate(fractions):
        errors: dict[str, list[float]] = {name: [] for name in models}
        accuracy: dict[str, list[float]] = {name: [] for name in models}
        for k in range(repeats):
            sub = subsample_fraction(train, f, sub_seed(seed, fi, k))
            for name, make in models.items():
                pred = make().fit(sub).predict(test.X)
                errors[name].append(error_rate(test.y, pred))
                accuracy[name].append(float(np.mean(np.asarray(pred) == test.y)))
        for name in models:
            mean, half = t_ci(errors[name])
            points.append(
                CurvePoint(
                    f,
                    name,
                    mean,
                    float(np.std(errors[name], ddof=1)),
                    half,
                    repeats,
                    float(np.mean(accuracy[name])),
                    tuple(errors[name]),
                )
            )
    return points


@dataclass(frozen=True)
class TimingPoint:
    n_pairs: int
    train_mean: float
    train_half_width: float
    test_mean: float
    test_half_width: float
    repeats: int
    train_ratios: tuple[float, ...] = field(default=(), repr=False)
    test_ratios: tuple[float, ...] = field(default=(), repr=False)


def _timed(clock: Callable[[], float], fn: Callable[[], object]) -> float:
    start = clock()
    fn()
    return clock() - start


def time_ratio(
    specs: Sequence[SegmentSpec],
    repeats: int = 10,
    seed: int = 0,
    config: FitConfig | None = None,
    test_fraction: float = 0.2,
    clock: Callable[[], float] = time.perf_counter,
    ciber: Callable[[], Classifier] | None = None,
    baseline: Callable[[], Classifier] | None = None,
) -> list[TimingPoint]:
    """Wall-clock CIBer / Naive Bayes ratios for fitting and for predicting, per segment setup.

    Runs are strictly sequential. ``clock``, ``ciber`` and ``baseline`` can be
    replaced for controlled tests.
    """
    if repeats < 2:
        raise TooFewRepeats(f"need at least 2 repeats, got {repeats}")
    config = config or FitConfig(bins=1000)
    ciber = ciber or (lambda: CIBer(config))
    baseline = baseline or (lambda: NaiveBayes(config))
    out = []
    for si, spec in enumerate(specs):
        train_r, test_r = [], []
        for k in range(repeats):
            ds = gen_segments(replace(spec, seed=sub_seed(seed, si, k, 0)))
            train, test = stratified_split(ds, test_fraction, sub_seed(seed, si, k, 1))
            a, b = ciber(), baseline()
            fit_b = _timed(clock, lambda: b.fit(train))
            fit_a = _timed(clock, lambda: a.fit(train))
            pred_b = _timed(clock, lambda: b.predict(test.X))
            pred_a = _timed(clock, lambda: a.predict(test.X))
            train_r.append(fit_a / fit_b)
            test_r.append(pred_a / pred_b)
        tm, th = t_ci(train_r)
        pm, ph = t_ci(test_r)
        out.append(TimingPoint(spec.n_pairs, tm, th, pm, ph, repeats, tuple(train_r), tuple(test_r)))
    return out


def linear_fit_r2(x, y) -> float:
    """Coefficient of determination of the least-squares line through (x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = np.sum((y - y.mean()) ** 2)
    return 1.0 if total == 0 else float(1 - np.sum(resid**2) / total)


CSV_COLUMNS = ("mean", "std", "ci_low", "ci_high", "repeats")


def write_curve_csv(points: Sequence[CurvePoint], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("fraction", "model", *CSV_COLUMNS))
        for p in points:
            w.writerow((repr(p.train_fraction), p.model, repr(p.mean), repr(p.std),
                        repr(p.ci_low), repr(p.ci_high), p.repeats))


def write_timing_csv(points: Sequence[TimingPoint], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("lambda", "model", *CSV_COLUMNS))
        for p in points:
            for name, mean, half, ratios in (
                ("train_ratio", p.train_mean, p.train_half_width, p.train_ratios),
                ("test_ratio", p.test_mean, p.test_half_width, p.test_ratios),
            ):
                std = float(np.std(ratios, ddof=1)) if len(ratios) > 1 else 0.0
                w.writerow((p.n_pairs, name, repr(mean), repr(std),
                            repr(mean - half), repr(mean + half), p.repeats))


def write_summary_json(points: Sequence, path: str | Path, **meta) -> None:
    doc = {**meta, "points": [asdict(p) for p in points]}
    for p, src in zip(doc["points"], points):
        if isinstance(src, CurvePoint):
            p["ci_low"], p["ci_high"] = src.ci_low, src.ci_high
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")

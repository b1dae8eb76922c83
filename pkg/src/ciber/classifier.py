"""Comonotone-independence Bayesian classifier and Naive Bayes baselines.

Features are split into groups. Inside a group of two or more features the
class-conditional joint probability of a cell of bin codes is the length of
the intersection of the per-feature conditional CDF intervals (the mass the
comonotone copula assigns to that cell). Groups are multiplied together as
in Naive Bayes. Everything is accumulated in the log domain.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from . import discretize
from .association import association_matrices
from .data import Dataset, FeatureType, rebalance
from .discretize import BinEdges
from .distribution import ConditionalTable
from .errors import (
    ConstantColumn,
    CorruptModel,
    DataError,
    DimensionMismatch,
    SingleClass,
    UnknownClass,
    VersionMismatch,
)
from .partition import Merge, Partition, cluster, distance_matrix

FORMAT_VERSION = 1


@dataclass(frozen=True)
class FitConfig:
    discretizer: str = "equal_width"
    bins: int = 10
    alpha: float = 1.0
    threshold: float = 0.2
    rebalance: str | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.discretizer not in ("equal_width", "mean_sigma", "mdlp"):
            raise ValueError(f"unknown discretizer {self.discretizer!r}")
        if self.bins < 2:
            raise ValueError(f"bins must be >= 2, got {self.bins}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not 0 <= self.threshold <= 1:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold}")
        if self.rebalance not in (None, "over", "under"):
            raise ValueError(f"rebalance must be None, 'over' or 'under', got {self.rebalance!r}")


@dataclass(frozen=True, eq=False)
class CiberModel:
    class_names: tuple[str, ...]
    priors: np.ndarray
    edges: tuple[BinEdges, ...]
    table: ConditionalTable
    partition: Partition
    column_names: tuple[str, ...]
    feature_types: tuple[FeatureType, ...]
    categories: tuple[tuple[str, ...] | None, ...]
    config: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self) -> None:
        priors = np.array(self.priors, dtype=float, copy=True)
        priors.setflags(write=False)
        object.__setattr__(self, "priors", priors)
        d = len(self.edges)
        if not (d == self.table.n_features == self.partition.n_features == len(self.column_names)):
            raise DataError("edges, table, partition and column names disagree on feature count")
        if priors.size != self.table.n_classes or priors.size != len(self.class_names):
            raise DataError("priors, table and class names disagree on class count")
        if abs(priors.sum() - 1) > 1e-9:
            raise DataError("priors must sum to 1")
        for i, e in enumerate(self.edges):
            if e.n_bins != self.table.n_bins(i):
                raise DataError(f"feature {i}: {e.n_bins} bins in edges, {self.table.n_bins(i)} in table")

    @property
    def n_features(self) -> int:
        return len(self.edges)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def alpha(self) -> float:
        return self.table.alpha

    @cached_property
    def _log_priors(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.priors)

    @cached_property
    def _log_probs(self) -> tuple[np.ndarray, ...]:
        with np.errstate(invalid="ignore"):
            return tuple(self.table.log_prob_table(i) for i in range(self.n_features))


# --------------------------------------------------------------------------- fit


def _fit_column_edges(ds: Dataset, j: int, config: FitConfig) -> BinEdges:
    col = ds.X[:, j]
    ftype = ds.feature_types[j]
    if ftype is FeatureType.CATEGORICAL:
        levels = ds.categories[j]
        n_levels = len(levels) if levels is not None else int(col.max()) + 1
        return BinEdges(np.arange(n_levels - 1, dtype=float), "distinct", j)
    if ftype is FeatureType.DISCRETE:
        return discretize.fit_distinct(col, j)
    try:
        return discretize.fit_edges(col, config.discretizer, config.bins, ds.y, j)
    except ConstantColumn:
        return BinEdges(np.empty(0), config.discretizer, j)


def encode(model: CiberModel, X) -> np.ndarray:
    """Bin codes (m, d) for raw feature rows."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatch(f"expected {model.n_features} features, got shape {X.shape}")
    return np.column_stack([discretize.apply(e, X[:, j]) for j, e in enumerate(model.edges)])


def fit(
    train: Dataset,
    config: FitConfig | None = None,
    edges: Sequence[BinEdges] | None = None,
) -> CiberModel:
    """Re-balance (optional), bin, count, measure association, cluster.

    ``edges`` overrides the fitted binning of every column.
    """
    config = config or FitConfig()
    if train.d < 1:
        raise DataError("need at least one feature")
    if np.unique(train.y).size < 2:
        raise SingleClass("training data must contain at least two classes")
    if config.rebalance is not None:
        train = rebalance(train, config.rebalance, config.seed)
    if edges is None:
        edges = tuple(_fit_column_edges(train, j, config) for j in range(train.d))
    else:
        edges = tuple(edges)
        if len(edges) != train.d:
            raise DimensionMismatch(f"{len(edges)} bin edges for {train.d} features")

    codes = np.column_stack([discretize.apply(e, train.X[:, j]) for j, e in enumerate(edges)])
    table = ConditionalTable.from_codes(
        codes, train.y, [e.n_bins for e in edges], train.n_classes, config.alpha
    )
    priors = train.class_counts() / train.n

    categorical = [j for j, t in enumerate(train.feature_types) if t is FeatureType.CATEGORICAL]
    if config.threshold == 0 or train.d - len(categorical) < 2:
        partition = Partition.singletons(train.d)
    else:
        numeric = [j for j in range(train.d) if j not in categorical]
        metrics = association_matrices(codes, numeric)
        partition = cluster(distance_matrix(metrics), config.threshold, exclude=categorical)

    return CiberModel(
        train.class_names,
        priors,
        edges,
        table,
        partition,
        train.column_names,
        train.feature_types,
        train.categories,
        config,
    )


def fit_naive_bayes(train: Dataset, config: FitConfig | None = None) -> CiberModel:
    """Same tables as ``fit`` with an all-singleton partition; skips association."""
    return fit(train, replace(config or FitConfig(), threshold=0.0))


# ----------------------------------------------------------------------- predict


def comonotone_measure(lo, hi) -> float:
    """Length of the intersection of intervals [lo_i, hi_i]."""
    return max(0.0, float(np.min(hi) - np.max(lo)))


def como_cell_prob(
    model: CiberModel, y: int, group: Sequence[int], codes: Sequence[int], smoothed: bool = True
) -> float:
    """Conditional probability of a joint cell of bin codes within a comonotone group.

    The raw value intersects the unsmoothed conditional CDF intervals. The
    smoothed value is (N_y * raw + alpha) / (N_y + alpha * K_g), K_g the
    largest bin count in the group, which equals the Laplace-smoothed
    marginal for a one-feature group.
    """
    t = model.table
    if not 0 <= y < t.n_classes:
        raise UnknownClass(f"class {y} not in 0..{t.n_classes - 1}")
    if len(group) != len(codes) or not group:
        raise DimensionMismatch("need one code per feature of a non-empty group")
    bounds = [t.count_interval(y, i, int(b)) for i, b in zip(group, codes)]
    # count units: every feature of class y shares the same total N_y
    overlap = max(0, min(hi for _, hi in bounds) - max(lo for lo, _ in bounds))
    n_y = t.class_totals[y]
    if not smoothed:
        return overlap / n_y
    k_g = max(t.n_bins(i) for i in group)
    return (overlap + t.alpha) / (n_y + t.alpha * k_g)


def _group_log_prob(model: CiberModel, group: Sequence[int], codes: np.ndarray) -> np.ndarray:
    t = model.table
    lo = np.max([t.cumulative[i][:, codes[:, i]] for i in group], axis=0)
    hi = np.min([t.cumulative[i][:, codes[:, i] + 1] for i in group], axis=0)
    overlap = np.maximum(hi - lo, 0)
    k_g = max(t.n_bins(i) for i in group)
    den = t.class_totals[:, None] + t.alpha * k_g
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log((overlap + t.alpha) / den).T


def log_joint(model: CiberModel, X, independent: bool = False) -> np.ndarray:
    """log P(y) + log P(x | y) for every row of X and class y, shape (m, C).

    ``independent=True`` ignores the partition (plain Naive Bayes).
    """
    codes = encode(model, X)
    score = np.tile(model._log_priors, (codes.shape[0], 1))
    groups = [(i,) for i in range(model.n_features)] if independent else model.partition.groups
    for g in groups:
        if len(g) == 1:
            score += model._log_probs[g[0]][:, codes[:, g[0]]].T
        else:
            score += _group_log_prob(model, g, codes)
    return score


def _normalise(model: CiberModel, score: np.ndarray) -> np.ndarray:
    top = score.max(axis=1, keepdims=True)
    dead = ~np.isfinite(top[:, 0])
    # every class impossible (only with alpha = 0): fall back to the priors
    top[dead] = 0.0
    with np.errstate(invalid="ignore"):
        p = np.exp(score - top)
    p[dead] = model.priors
    return p / p.sum(axis=1, keepdims=True)


def _squeeze(X, p: np.ndarray) -> np.ndarray:
    return p[0] if np.ndim(X) == 1 else p


def predict_proba(model: CiberModel, X) -> np.ndarray:
    return _squeeze(X, _normalise(model, log_joint(model, X)))


def naive_bayes_predict_proba(model: CiberModel, X) -> np.ndarray:
    return _squeeze(X, _normalise(model, log_joint(model, X, independent=True)))


def weighted_nb_predict_proba(model: CiberModel, weights, X) -> np.ndarray:
    """Naive Bayes with every likelihood factor raised to a per-feature weight."""
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.size != model.n_features:
        raise DimensionMismatch(f"expected {model.n_features} weights, got {w.size}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError("weights must be finite and non-negative")
    codes = encode(model, X)
    score = np.tile(model._log_priors, (codes.shape[0], 1))
    for i in range(model.n_features):
        if w[i] != 0:
            score += w[i] * model._log_probs[i][:, codes[:, i]].T
    return _squeeze(X, _normalise(model, score))


def predict(model: CiberModel, X) -> np.ndarray:
    """Most probable class code; ties go to the lowest code."""
    p = predict_proba(model, X)
    return np.argmax(p, axis=-1)


# ------------------------------------------------------------------ estimators


class CIBer:
    """fit/predict adapter used by the benchmark harness."""

    def __init__(self, config: FitConfig | None = None, **kwargs) -> None:
        self.config = replace(config or FitConfig(), **kwargs)
        self.model_: CiberModel | None = None

    def _fit(self, ds: Dataset) -> CiberModel:
        return fit(ds, self.config)

    def fit(self, ds: Dataset) -> CIBer:
        self.model_ = self._fit(ds)
        return self

    def predict_proba(self, X) -> np.ndarray:
        return predict_proba(self.model_, X)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=-1)


class NaiveBayes(CIBer):
    def _fit(self, ds: Dataset) -> CiberModel:
        return fit_naive_bayes(ds, self.config)

    def predict_proba(self, X) -> np.ndarray:
        return naive_bayes_predict_proba(self.model_, X)


# ---------------------------------------------------------------- serialization


def to_dict(model: CiberModel) -> dict:
    return {
        "format": "ciber-model",
        "version": FORMAT_VERSION,
        "class_names": list(model.class_names),
        "priors": [float(p) for p in model.priors],
        "column_names": list(model.column_names),
        "feature_types": [t.value for t in model.feature_types],
        "categories": [list(c) if c is not None else None for c in model.categories],
        "bin_edges": [
            {"scheme": e.scheme, "column": e.column_index, "cuts": [float(c) for c in e.cuts]}
            for e in model.edges
        ],
        "counts": [c.tolist() for c in model.table.counts],
        "alpha": model.alpha,
        "partition": {
            "groups": [list(g) for g in model.partition.groups],
            "threshold": model.partition.threshold,
            "merges": [
                {"left": list(m.left), "right": list(m.right), "distance": m.distance}
                for m in model.partition.merges
            ],
        },
        "discretizer": asdict(model.config),
    }


def from_dict(doc: dict) -> CiberModel:
    if not isinstance(doc, dict) or doc.get("format") != "ciber-model":
        raise CorruptModel("not a ciber model document")
    if doc.get("version") != FORMAT_VERSION:
        raise VersionMismatch(f"model format version {doc.get('version')!r}, expected {FORMAT_VERSION}")
    try:
        part = doc["partition"]
        return CiberModel(
            tuple(doc["class_names"]),
            np.array(doc["priors"], dtype=float),
            tuple(BinEdges(np.array(e["cuts"], dtype=float), e["scheme"], e["column"]) for e in doc["bin_edges"]),
            ConditionalTable(tuple(np.array(c, dtype=np.int64) for c in doc["counts"]), doc["alpha"]),
            Partition(
                tuple(tuple(g) for g in part["groups"]),
                part["threshold"],
                tuple(Merge(tuple(m["left"]), tuple(m["right"]), m["distance"]) for m in part["merges"]),
            ),
            tuple(doc["column_names"]),
            tuple(FeatureType(t) for t in doc["feature_types"]),
            tuple(tuple(c) if c is not None else None for c in doc["categories"]),
            FitConfig(**doc["discretizer"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"malformed model document: {exc}") from exc


def save(model: CiberModel, path: str | Path) -> None:
    text = json.dumps(to_dict(model), indent=1)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load(path: str | Path) -> CiberModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptModel(f"{path}: not valid JSON ({exc})") from exc
    return from_dict(doc)

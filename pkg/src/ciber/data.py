"""Tabular datasets: CSV ingestion, stratified sampling and class re-balancing."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    ClassTooSmall,
    DataError,
    EmptyData,
    MissingTarget,
    MissingValue,
    NonRectangular,
    SingleClass,
    TooFewRows,
)

log = logging.getLogger(__name__)

MAX_CATEGORIES = 20
_MISSING_TOKENS = frozenset({"", "na", "nan", "null", "none", "?"})


class FeatureType(str, Enum):
    CATEGORICAL = "categorical"
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix with integer class labels.

    ``X`` has shape (n, d). Categorical columns hold dense integer codes whose
    text values are listed in ``categories[j]``; other entries of
    ``categories`` are None. ``class_names[k]`` is the original label of code k.
    """

    X: np.ndarray
    y: np.ndarray
    feature_types: tuple[FeatureType, ...]
    column_names: tuple[str, ...]
    class_names: tuple[str, ...]
    categories: tuple[tuple[str, ...] | None, ...] = field(default=())

    def __post_init__(self) -> None:
        X = np.array(self.X, dtype=float, copy=True)
        y = np.array(self.y, dtype=np.int64, copy=True)
        if X.ndim != 2:
            raise NonRectangular(f"feature matrix must be 2-D, got shape {X.shape}")
        n, d = X.shape
        if n == 0:
            raise EmptyData("dataset has no rows")
        if y.shape != (n,):
            raise NonRectangular(f"expected {n} labels, got shape {y.shape}")
        if not np.all(np.isfinite(X)):
            raise MissingValue("feature matrix contains non-finite values")
        if len(self.feature_types) != d or len(self.column_names) != d:
            raise NonRectangular("feature_types/column_names must have one entry per column")
        if y.min() < 0 or y.max() >= len(self.class_names):
            raise DataError("labels must index into class_names")
        cats = self.categories or (None,) * d
        if len(cats) != d:
            raise NonRectangular("categories must have one entry per column")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_types", tuple(FeatureType(t) for t in self.feature_types))
        object.__setattr__(self, "column_names", tuple(self.column_names))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "categories", tuple(cats))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)

    def take(self, rows: Sequence[int] | np.ndarray) -> Dataset:
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(
            self.X[rows],
            self.y[rows],
            self.feature_types,
            self.column_names,
            self.class_names,
            self.categories,
        )


def from_arrays(
    X,
    y,
    feature_types: Sequence[FeatureType | str] | None = None,
    column_names: Sequence[str] | None = None,
) -> Dataset:
    """Build a Dataset from in-memory arrays; labels are re-encoded as 0..C-1."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    d = X.shape[1]
    y = np.asarray(y)
    classes, codes = np.unique(y, return_inverse=True)
    return Dataset(
        X,
        codes.reshape(-1),
        tuple(feature_types) if feature_types is not None else (FeatureType.CONTINUOUS,) * d,
        tuple(column_names) if column_names is not None else tuple(f"x{j}" for j in range(d)),
        tuple(str(c) for c in classes),
    )


def _parse_float(cell: str) -> float | None:
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def _is_missing(cell: str) -> bool:
    return cell.strip().lower() in _MISSING_TOKENS


def _infer_type(values: list[str], max_categories: int) -> FeatureType:
    parsed = [_parse_float(v) for v in values]
    if any(p is None for p in parsed):
        return FeatureType.CATEGORICAL
    if all(p == int(p) for p in parsed) and len(set(parsed)) <= max_categories:
        return FeatureType.DISCRETE
    return FeatureType.CONTINUOUS


def _read_rows(path: str | Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]  # blank lines
    if not rows:
        raise EmptyData(f"{path}: no header row")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise NonRectangular(
                f"{path}: line {lineno} has {len(row)} fields, header has {len(header)}"
            )
    return header, body


def load_csv(
    path: str | Path,
    target_column: str,
    type_overrides: Mapping[str, FeatureType | str] | None = None,
    max_categories: int = MAX_CATEGORIES,
    on_missing: str = "drop",
) -> Dataset:
    """Read a headered CSV file into a Dataset.

    Rows with a missing or non-numeric cell in a numeric column are dropped
    (``on_missing="drop"``, the count is logged) or rejected with
    MissingValue (``on_missing="error"``). Categorical columns get dense codes
    in sorted order of their text values; class labels likewise.
    """
    if on_missing not in ("drop", "error"):
        raise ValueError(f"on_missing must be 'drop' or 'error', got {on_missing!r}")
    header, body = _read_rows(path)
    if target_column not in header:
        raise MissingTarget(f"{path}: target column {target_column!r} not in header")
    if not body:
        raise EmptyData(f"{path}: no data rows")
    t = header.index(target_column)
    feat_idx = [j for j in range(len(header)) if j != t]
    overrides = {k: FeatureType(v) for k, v in (type_overrides or {}).items()}
    unknown = set(overrides) - set(header)
    if unknown:
        raise DataError(f"type override for unknown column(s): {sorted(unknown)}")

    # missingness is judged per cell first so type inference sees clean values
    present = [[not _is_missing(row[j]) for j in range(len(header))] for row in body]
    types: dict[int, FeatureType] = {}
    for j in feat_idx:
        vals = [row[j].strip() for row, ok in zip(body, present) if ok[j]]
        name = header[j]
        types[j] = overrides.get(name) or (
            _infer_type(vals, max_categories) if vals else FeatureType.CONTINUOUS
        )

    keep: list[int] = []
    for r, (row, ok) in enumerate(zip(body, present)):
        good = ok[t]
        for j in feat_idx:
            if not good:
                break
            if not ok[j]:
                good = False
            elif types[j] is not FeatureType.CATEGORICAL and _parse_float(row[j]) is None:
                good = False
        if good:
            keep.append(r)
        elif on_missing == "error":
            raise MissingValue(f"{path}: line {r + 2} has a missing or non-numeric value")
    dropped = len(body) - len(keep)
    if dropped:
        log.warning("%s: dropped %d of %d rows with missing or invalid cells", path, dropped, len(body))
    if not keep:
        raise EmptyData(f"{path}: every row was rejected")

    rows = [body[r] for r in keep]
    X = np.empty((len(rows), len(feat_idx)))
    categories: list[tuple[str, ...] | None] = []
    for c, j in enumerate(feat_idx):
        cells = [row[j].strip() for row in rows]
        if types[j] is FeatureType.CATEGORICAL:
            levels = tuple(sorted(set(cells)))
            lookup = {v: k for k, v in enumerate(levels)}
            X[:, c] = [lookup[v] for v in cells]
            categories.append(levels)
        else:
            X[:, c] = [float(v) for v in cells]
            categories.append(None)

    labels = [row[t].strip() for row in rows]
    class_names = tuple(sorted(set(labels)))
    lookup = {v: k for k, v in enumerate(class_names)}
    return Dataset(
        X,
        np.array([lookup[v] for v in labels], dtype=np.int64),
        tuple(types[j] for j in feat_idx),
        tuple(header[j] for j in feat_idx),
        class_names,
        tuple(categories),
    )


def read_features(
    path: str | Path,
    column_names: Sequence[str],
    categories: Sequence[tuple[str, ...] | None],
) -> np.ndarray:
    """Read the named feature columns of a CSV for prediction.

    Extra columns (e.g. the target) are ignored. Categorical cells are mapped
    through the training-time ``categories``; unseen levels get the code one
    past the last known level. Missing cells raise MissingValue.
    """
    header, body = _read_rows(path)
    missing = [c for c in column_names if c not in header]
    if missing:
        raise DataError(f"{path}: missing feature column(s) {missing}")
    if not body:
        raise EmptyData(f"{path}: no data rows")
    X = np.empty((len(body), len(column_names)))
    for c, name in enumerate(column_names):
        j = header.index(name)
        levels = categories[c]
        lookup = {v: k for k, v in enumerate(levels)} if levels is not None else None
        for r, row in enumerate(body):
            cell = row[j].strip()
            if _is_missing(cell):
                raise MissingValue(f"{path}: line {r + 2} column {name!r} is missing")
            if lookup is not None:
                X[r, c] = lookup.get(cell, len(levels))
            else:
                v = _parse_float(cell)
                if v is None:
                    raise MissingValue(f"{path}: line {r + 2} column {name!r} is not numeric")
                X[r, c] = v
    return X


def write_csv(ds: Dataset, path: str | Path, target_column: str = "y") -> None:
    """Write ``ds`` in a form ``load_csv`` reads back."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*ds.column_names, target_column])
        for row, label in zip(ds.X, ds.y):
            cells = []
            for c, v in enumerate(row):
                levels = ds.categories[c]
                cells.append(levels[int(v)] if levels is not None else repr(float(v)))
            w.writerow([*cells, ds.class_names[label]])


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_indices(
    y: np.ndarray, test_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Row indices (train, test), each sorted, splitting every class by ``test_fraction``."""
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for label in np.unique(y):
        rows = np.flatnonzero(y == label)
        if rows.size < 2:
            raise ClassTooSmall(f"class {label} has {rows.size} instance(s); need at least 2")
        n_test = min(max(_round_half_up(test_fraction * rows.size), 1), rows.size - 1)
        rows = rng.permutation(rows)
        test.append(rows[:n_test])
        train.append(rows[n_test:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def stratified_split(ds: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    train, test = stratified_indices(ds.y, test_fraction, seed)
    return ds.take(train), ds.take(test)


def subsample_fraction(ds: Dataset, fraction: float, seed: int) -> Dataset:
    """Stratified subsample keeping ``fraction`` of each class (at least one row each)."""
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    if fraction == 1:
        return ds
    present = np.unique(ds.y)
    if fraction * ds.n < present.size:
        raise TooFewRows(
            f"fraction {fraction} of {ds.n} rows cannot cover {present.size} classes"
        )
    rng = np.random.default_rng(seed)
    keep = []
    for label in present:
        rows = np.flatnonzero(ds.y == label)
        k = max(_round_half_up(fraction * rows.size), 1)
        keep.append(rng.choice(rows, size=k, replace=False))
    return ds.take(np.sort(np.concatenate(keep)))


def rebalance(ds: Dataset, mode: str, seed: int) -> Dataset:
    """Equalise class counts by over-sampling minorities or under-sampling majorities."""
    if mode not in ("over", "under"):
        raise ValueError(f"mode must be 'over' or 'under', got {mode!r}")
    present = np.unique(ds.y)
    if present.size < 2:
        raise SingleClass("re-balancing needs at least two classes")
    counts = {label: int(np.sum(ds.y == label)) for label in present}
    rng = np.random.default_rng(seed)
    if mode == "over":
        target = max(counts.values())
        extra = [
            rng.choice(np.flatnonzero(ds.y == label), size=target - c, replace=True)
            for label, c in counts.items()
        ]
        rows = np.concatenate([np.arange(ds.n), *extra])
    else:
        target = min(counts.values())
        rows = np.sort(
            np.concatenate(
                [
                    rng.choice(np.flatnonzero(ds.y == label), size=target, replace=False)
                    for label in counts
                ]
            )
        )
    return ds.take(rows)

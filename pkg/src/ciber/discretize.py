"""Binning of numeric columns into integer codes.

Every scheme produces a strictly increasing vector of cut points. A value x is
coded as the number of cuts strictly below it, so bins are right-closed:
``(-inf, c0], (c0, c1], ..., (c_last, +inf)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstantColumn, DataError, SingleClass

SCHEMES = ("equal_width", "mean_sigma", "mdlp", "distinct")


@dataclass(frozen=True, eq=False)
class BinEdges:
    cuts: np.ndarray
    scheme: str
    column_index: int = 0

    def __post_init__(self) -> None:
        cuts = np.array(self.cuts, dtype=float, copy=True).reshape(-1)
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if cuts.size and not np.all(np.diff(cuts) > 0):
            raise ValueError("cuts must be strictly increasing")
        cuts.setflags(write=False)
        object.__setattr__(self, "cuts", cuts)

    @property
    def n_bins(self) -> int:
        return self.cuts.size + 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinEdges):
            return NotImplemented
        return (
            self.scheme == other.scheme
            and self.column_index == other.column_index
            and np.array_equal(self.cuts, other.cuts)
        )


def apply(edges: BinEdges, column) -> np.ndarray:
    """Bin codes of ``column``; values past the fitted range land in the edge bins."""
    return np.searchsorted(edges.cuts, np.asarray(column, dtype=float), side="left")


def _finite(column) -> np.ndarray:
    x = np.asarray(column, dtype=float).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise DataError("column contains non-finite values")
    return x


def fit_equal_width(column, bins: int, column_index: int = 0) -> BinEdges:
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    x = _finite(column)
    lo, hi = (x.min(), x.max()) if x.size else (0.0, 0.0)
    if not hi > lo:
        raise ConstantColumn("equal-width binning needs at least two distinct values")
    k = np.arange(1, bins)
    cuts = lo + (hi - lo) * k / bins
    # float rounding can collapse neighbouring cuts for tiny ranges
    cuts = np.unique(cuts)
    return BinEdges(cuts, "equal_width", column_index)


def fit_mean_sigma(column, column_index: int = 0) -> BinEdges:
    x = _finite(column)
    if x.size < 2:
        raise ConstantColumn("need at least two values for a standard deviation")
    mu = x.mean()
    sigma = x.std(ddof=1)
    if not sigma > 0:
        raise ConstantColumn("mean/sigma binning needs positive standard deviation")
    return BinEdges(mu + sigma * np.arange(-3, 4), "mean_sigma", column_index)


def fit_distinct(column, column_index: int = 0) -> BinEdges:
    """One bin per distinct value, for discrete and categorical columns."""
    values = np.unique(_finite(column))
    return BinEdges(values[:-1], "distinct", column_index)


def _entropy(counts: np.ndarray) -> np.ndarray:
    """Base-2 entropy of class-count rows (last axis)."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(counts > 0, counts / total, 1.0)
        return -np.sum(np.where(counts > 0, p * np.log2(p), 0.0), axis=-1)


def mdlp_accepts(parent: np.ndarray, left: np.ndarray, right: np.ndarray) -> bool:
    """Fayyad-Irani stopping rule on class-count vectors; True keeps the split."""
    n = parent.sum()
    n1, n2 = left.sum(), right.sum()
    h, h1, h2 = _entropy(parent), _entropy(left), _entropy(right)
    k, k1, k2 = (int(np.count_nonzero(c)) for c in (parent, left, right))
    gain = h - (n1 * h1 + n2 * h2) / n
    delta = math.log2(3**k - 2) - (k * h - k1 * h1 - k2 * h2)
    return gain > (math.log2(n - 1) + delta) / n


# two candidate cuts whose weighted entropies differ by less than this are tied
_TIE_TOL = 1e-12


def _mdlp_cuts(values: np.ndarray, onehot: np.ndarray, out: list[float]) -> None:
    # values sorted; onehot[r] is the class indicator row of values[r]
    n = values.size
    boundary = np.flatnonzero(values[1:] != values[:-1])  # split after row b
    if boundary.size == 0:
        return
    cum = np.cumsum(onehot, axis=0)
    parent = cum[-1]
    left = cum[boundary]
    right = parent - left
    n_left = boundary + 1.0
    weighted = (n_left * _entropy(left) + (n - n_left) * _entropy(right)) / n
    best = int(np.flatnonzero(weighted <= weighted.min() + _TIE_TOL)[0])
    b = boundary[best]
    if not mdlp_accepts(parent, left[best], right[best]):
        return
    _mdlp_cuts(values[: b + 1], onehot[: b + 1], out)
    out.append((values[b] + values[b + 1]) / 2)
    _mdlp_cuts(values[b + 1 :], onehot[b + 1 :], out)


def fit_mdlp(column, labels, column_index: int = 0) -> BinEdges:
    """Recursive entropy-minimising binary splits, kept while the MDL rule accepts them.

    Candidate cuts are midpoints between adjacent distinct values; among
    equally good candidates the lowest one wins.
    """
    x = _finite(column)
    y = np.asarray(labels).reshape(-1)
    if x.size != y.size:
        raise DataError(f"column has {x.size} values but {y.size} labels")
    classes, codes = np.unique(y, return_inverse=True)
    if classes.size < 2:
        raise SingleClass("MDLP needs at least two classes")
    order = np.argsort(x, kind="stable")
    onehot = np.eye(classes.size)[codes[order]]
    cuts: list[float] = []
    _mdlp_cuts(x[order], onehot, cuts)
    return BinEdges(np.array(cuts), "mdlp", column_index)


def fit_edges(
    column, scheme: str, bins: int = 10, labels=None, column_index: int = 0
) -> BinEdges:
    if scheme == "equal_width":
        return fit_equal_width(column, bins, column_index)
    if scheme == "mean_sigma":
        return fit_mean_sigma(column, column_index)
    if scheme == "mdlp":
        if labels is None:
            raise ValueError("mdlp needs class labels")
        return fit_mdlp(column, labels, column_index)
    if scheme == "distinct":
        return fit_distinct(column, column_index)
    raise ValueError(f"unknown scheme {scheme!r}")

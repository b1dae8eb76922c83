"""Empirical distribution functions and class-conditional bin tables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, UnknownClass


class Ecdf:
    """Empirical CDF: F(x) = #{samples <= x} / n."""

    def __init__(self, samples) -> None:
        s = np.sort(np.asarray(samples, dtype=float).reshape(-1))
        if s.size == 0:
            raise DataError("an empirical CDF needs at least one sample")
        s.setflags(write=False)
        self.sorted_samples = s
        self.n = s.size

    def __call__(self, x):
        out = np.searchsorted(self.sorted_samples, x, side="right") / self.n
        return float(out) if np.ndim(out) == 0 else out


def ecdf_eval(e: Ecdf, x: float) -> float:
    return e(x)


@dataclass(frozen=True, eq=False)
class ConditionalTable:
    """Bin counts per class and feature with additive (Laplace) smoothing.

    ``counts[i]`` has shape (n_classes, K_i). Every feature is counted over
    the same rows, so ``counts[i][y].sum()`` is the class total for all i.
    Cumulative counts are precomputed; lookups never re-sum.
    """

    counts: tuple[np.ndarray, ...]
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        counts = tuple(np.array(c, dtype=np.int64, copy=True) for c in self.counts)
        if not counts:
            raise DataError("table needs at least one feature")
        totals = counts[0].sum(axis=1)
        for c in counts:
            if c.ndim != 2 or c.shape[0] != totals.size or np.any(c < 0):
                raise DataError("counts must be non-negative (n_classes, K) arrays")
            if not np.array_equal(c.sum(axis=1), totals):
                raise DataError("every feature must be counted over the same rows")
        cum = []
        for c in counts:
            c.setflags(write=False)
            k = np.zeros((c.shape[0], c.shape[1] + 1), dtype=np.int64)
            np.cumsum(c, axis=1, out=k[:, 1:])
            k.setflags(write=False)
            cum.append(k)
        totals.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "class_totals", totals)
        object.__setattr__(self, "cumulative", tuple(cum))

    @classmethod
    def from_codes(
        cls, codes: np.ndarray, y: np.ndarray, n_bins: Sequence[int], n_classes: int, alpha: float = 1.0
    ) -> ConditionalTable:
        codes = np.asarray(codes, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        counts = []
        for i, k in enumerate(n_bins):
            flat = y * k + codes[:, i]
            counts.append(np.bincount(flat, minlength=n_classes * k).reshape(n_classes, k))
        return cls(tuple(counts), alpha)

    @property
    def n_classes(self) -> int:
        return self.class_totals.size

    @property
    def n_features(self) -> int:
        return len(self.counts)

    def n_bins(self, i: int) -> int:
        return self.counts[i].shape[1]

    def _check(self, y: int, i: int, b: int) -> None:
        if not 0 <= y < self.n_classes:
            raise UnknownClass(f"class {y} not in 0..{self.n_classes - 1}")
        if not 0 <= i < self.n_features:
            raise IndexError(f"feature {i} out of range")
        if not 0 <= b < self.n_bins(i):
            raise IndexError(f"bin {b} out of range for feature {i}")

    def _denominator(self, y: int, i: int) -> float:
        return self.class_totals[y] + self.alpha * self.n_bins(i)

    def prob(self, y: int, i: int, b: int) -> float:
        self._check(y, i, b)
        return (self.counts[i][y, b] + self.alpha) / self._denominator(y, i)

    def cdf_interval(self, y: int, i: int, b: int) -> tuple[float, float]:
        self._check(y, i, b)
        den = self._denominator(y, i)
        cum = self.cumulative[i][y]
        return (cum[b] + self.alpha * b) / den, (cum[b + 1] + self.alpha * (b + 1)) / den

    def count_interval(self, y: int, i: int, b: int) -> tuple[int, int]:
        """Unsmoothed cumulative counts (before bin b, through bin b) for class y."""
        self._check(y, i, b)
        cum = self.cumulative[i][y]
        return int(cum[b]), int(cum[b + 1])

    def log_prob_table(self, i: int) -> np.ndarray:
        """(n_classes, K_i) array of log smoothed probabilities."""
        den = self.class_totals[:, None] + self.alpha * self.n_bins(i)
        with np.errstate(divide="ignore"):
            return np.log((self.counts[i] + self.alpha) / den)


def conditional_prob(t: ConditionalTable, y: int, i: int, b: int) -> float:
    return t.prob(y, i, b)


def conditional_cdf_interval(t: ConditionalTable, y: int, i: int, b: int) -> tuple[float, float]:
    return t.cdf_interval(y, i, b)

"""Pairwise dependence measures used to judge whether two features move together."""

from __future__ import annotations

from typing import Iterable

import numpy as np
from scipy import stats

from .errors import DataError, ZeroVariance

METRICS = ("pearson", "spearman", "kendall", "nmi")


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if x.size != y.size:
        raise DataError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise DataError("need at least two observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise ZeroVariance("correlation is undefined for a constant vector")
    return x, y


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    r = np.dot(xc, yc) / np.sqrt(np.dot(xc, xc) * np.dot(yc, yc))
    return float(np.clip(r, -1.0, 1.0))


def pearson(x, y) -> float:
    return _pearson(*_pair(x, y))


def spearman(x, y) -> float:
    """Pearson correlation of average ranks."""
    x, y = _pair(x, y)
    return _pearson(stats.rankdata(x), stats.rankdata(y))


def kendall(x, y) -> float:
    """Kendall's tau-b (tie-corrected)."""
    x, y = _pair(x, y)
    tau = stats.kendalltau(x, y, variant="b").statistic
    return float(np.clip(tau, -1.0, 1.0))


def _entropy_of_counts(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log(p)))


def nmi(x, y) -> float:
    """Normalised mutual information 2 I(X;Y) / (H(X) + H(Y)) of two code vectors.

    Defined as 1 when both vectors are constant.
    """
    x = np.asarray(x).reshape(-1)
    y = np.asarray(y).reshape(-1)
    if x.size != y.size:
        raise DataError(f"length mismatch: {x.size} vs {y.size}")
    if x.size == 0:
        raise DataError("need at least one observation")
    _, xi = np.unique(x, return_inverse=True)
    _, yi = np.unique(y, return_inverse=True)
    xi = xi.reshape(-1)
    yi = yi.reshape(-1)
    hx = _entropy_of_counts(np.bincount(xi))
    hy = _entropy_of_counts(np.bincount(yi))
    if hx + hy == 0:
        return 1.0
    _, joint = np.unique(xi * (yi.max() + 1) + yi, return_counts=True)
    mi = hx + hy - _entropy_of_counts(joint)
    return float(np.clip(2 * mi / (hx + hy), 0.0, 1.0))


_FUNCS = {"pearson": pearson, "spearman": spearman, "kendall": kendall, "nmi": nmi}


def association_matrices(
    codes: np.ndarray,
    columns: Iterable[int] | None = None,
    metrics: Iterable[str] = METRICS,
) -> dict[str, np.ndarray]:
    """d x d matrix per metric over the selected columns of ``codes``.

    Rows/columns outside ``columns`` stay 0 off the diagonal. A correlation
    that is undefined because one column is constant counts as 0.
    """
    codes = np.asarray(codes)
    d = codes.shape[1]
    cols = sorted(range(d) if columns is None else columns)
    metrics = tuple(metrics)
    out = {}
    for m in metrics:
        if m not in _FUNCS:
            raise ValueError(f"unknown metric {m!r}")
        mat = np.eye(d)
        for a, i in enumerate(cols):
            for j in cols[a + 1 :]:
                try:
                    v = _FUNCS[m](codes[:, i], codes[:, j])
                except ZeroVariance:
                    v = 0.0
                mat[i, j] = mat[j, i] = v
        out[m] = mat
    return out

"""Grouping features into comonotone clusters by complete-linkage clustering."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .association import METRICS


@dataclass(frozen=True)
class Merge:
    left: tuple[int, ...]
    right: tuple[int, ...]
    distance: float


@dataclass(frozen=True)
class Partition:
    groups: tuple[tuple[int, ...], ...]
    threshold: float = 0.0
    merges: tuple[Merge, ...] = field(default=())

    def __post_init__(self) -> None:
        groups = tuple(tuple(sorted(int(i) for i in g)) for g in self.groups)
        if any(not g for g in groups):
            raise ValueError("groups must be non-empty")
        flat = [i for g in groups for i in g]
        if sorted(flat) != list(range(len(flat))):
            raise ValueError("groups must be disjoint and cover 0..d-1")
        object.__setattr__(self, "groups", tuple(sorted(groups)))

    @classmethod
    def singletons(cls, d: int) -> Partition:
        return cls(tuple((i,) for i in range(d)))

    @property
    def n_features(self) -> int:
        return sum(len(g) for g in self.groups)

    @property
    def clusters(self) -> tuple[tuple[int, ...], ...]:
        return tuple(g for g in self.groups if len(g) > 1)

    @property
    def independent(self) -> tuple[int, ...]:
        return tuple(g[0] for g in self.groups if len(g) == 1)


def association_distance(metrics: Mapping[str, np.ndarray], i: int, j: int) -> float:
    """1 - max(|pearson|, |spearman|, |kendall|, nmi); 0 on the diagonal."""
    if i == j:
        return 0.0
    strength = max(abs(float(metrics[m][i, j])) for m in METRICS if m in metrics)
    return float(min(max(1.0 - strength, 0.0), 1.0))


def distance_matrix(metrics: Mapping[str, np.ndarray]) -> np.ndarray:
    d = next(iter(metrics.values())).shape[0]
    out = np.zeros((d, d))
    for i in range(d):
        for j in range(i + 1, d):
            out[i, j] = out[j, i] = association_distance(metrics, i, j)
    return out


def cluster(
    distances, threshold: float, exclude: Iterable[int] = ()
) -> Partition:
    """Complete-linkage agglomeration of the features not in ``exclude``.

    Two clusters merge while their linkage distance (largest pairwise
    distance) is strictly below ``threshold``; threshold 0 therefore always
    yields singletons. Equal linkage distances are resolved by the smallest
    (first member, first member) pair. Excluded features become singletons.
    """
    D = np.asarray(distances, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError("distance matrix must be square")
    if not 0 <= threshold <= 1:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    d = D.shape[0]
    skip = set(exclude)
    active = [[i] for i in range(d) if i not in skip]
    merges = []
    while len(active) > 1:
        best = None
        for a in range(len(active)):
            for b in range(a + 1, len(active)):
                link = max(D[i, j] for i in active[a] for j in active[b])
                key = (link, active[a][0], active[b][0])
                if best is None or key < best[0]:
                    best = (key, a, b)
        (link, _, _), a, b = best
        if not link < threshold:
            break
        merges.append(Merge(tuple(active[a]), tuple(active[b]), float(link)))
        active[a] = sorted(active[a] + active[b])
        del active[b]
        active.sort(key=lambda g: g[0])
    groups = [tuple(g) for g in active] + [(i,) for i in sorted(skip)]
    return Partition(tuple(groups), float(threshold), tuple(merges))

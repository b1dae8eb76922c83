"""Synthetic two-segment data: each feature pair lies on one of two parallel lines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, FeatureType

_GRID = 2.0**40


@dataclass(frozen=True)
class SegmentSpec:
    """Class 0: x_b = x_a + offset, x_a ~ U(range0); class 1: x_b = x_a - offset, x_a ~ U(range1)."""

    n_per_class: int = 5000
    n_pairs: int = 1
    offset: float = 20.0
    range0: tuple[float, float] = (0.0, 100.0)
    range1: tuple[float, float] = (20.0, 120.0)
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_per_class < 1:
            raise ValueError("n_per_class must be >= 1")
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be >= 1")
        for lo, hi in (self.range0, self.range1):
            if not hi > lo:
                raise ValueError(f"empty range ({lo}, {hi})")
        if self.noise < 0:
            raise ValueError("noise must be >= 0")


def gen_segments(spec: SegmentSpec) -> Dataset:
    """Rows of class 0 first, then class 1; columns x0, x1, ..., x{2*pairs-1}."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n_per_class
    blocks = []
    for rng_range, sign in ((spec.range0, 1.0), (spec.range1, -1.0)):
        block = np.empty((n, 2 * spec.n_pairs))
        for p in range(spec.n_pairs):
            # snap to a 2**-40 grid so that a +/- offset is exact for moderate magnitudes
            a = np.round(rng.uniform(*rng_range, size=n) * _GRID) / _GRID
            b = a + sign * spec.offset
            if spec.noise:
                b = b + rng.normal(0.0, spec.noise, size=n)
            block[:, 2 * p] = a
            block[:, 2 * p + 1] = b
        blocks.append(block)
    d = 2 * spec.n_pairs
    return Dataset(
        np.vstack(blocks),
        np.repeat([0, 1], n),
        (FeatureType.CONTINUOUS,) * d,
        tuple(f"x{j}" for j in range(d)),
        ("0", "1"),
    )

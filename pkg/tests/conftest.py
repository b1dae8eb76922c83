import dataclasses

import numpy as np
import pytest

from ciber import classifier
from ciber.classifier import FitConfig
from ciber.data import Dataset, FeatureType
from ciber.discretize import BinEdges
from ciber.partition import Partition

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def segment_grid_dataset() -> Dataset:
    """Two line segments sampled on an integer grid: every 10-wide bin holds 10 points per class."""
    a = np.arange(1, 101, dtype=float)
    b = np.arange(21, 121, dtype=float)
    X = np.vstack([np.column_stack([a, a + 20]), np.column_stack([b, b - 20])])
    y = np.repeat([0, 1], 100)
    return Dataset(X, y, (FeatureType.CONTINUOUS,) * 2, ("x0", "x1"), ("0", "1"))


def worked_example_model(alpha: float = 0.0) -> classifier.CiberModel:
    """Bins of length 10 on [0, 120], equal priors, both features in one comonotone group."""
    cuts = np.arange(10.0, 120.0, 10.0)
    edges = (BinEdges(cuts, "equal_width", 0), BinEdges(cuts, "equal_width", 1))
    model = classifier.fit(segment_grid_dataset(), FitConfig(alpha=alpha, threshold=0.0), edges=edges)
    return dataclasses.replace(model, partition=Partition(((0, 1),), threshold=1.0))


@pytest.fixture
def worked_model():
    return worked_example_model()


def random_dataset(rng: np.random.Generator, n: int, d: int, n_classes: int = 2) -> Dataset:
    X = rng.normal(size=(n, d))
    # mix in some structure so that clusters can form
    if d >= 2:
        X[:, 1] = X[:, 0] * rng.uniform(0.5, 2) + rng.normal(scale=0.1, size=n)
    y = np.arange(n) % n_classes
    rng.shuffle(y)
    types = [FeatureType.CONTINUOUS] * d
    if d >= 3 and rng.random() < 0.5:
        X[:, 2] = rng.integers(0, 4, size=n)
        types[2] = FeatureType.DISCRETE
    return Dataset(X, y, tuple(types), tuple(f"f{j}" for j in range(d)), tuple(str(k) for k in range(n_classes)))

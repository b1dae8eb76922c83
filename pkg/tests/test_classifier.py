import dataclasses
import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ciber import classifier
from ciber.classifier import (
    CIBer,
    FitConfig,
    NaiveBayes,
    como_cell_prob,
    comonotone_measure,
    fit,
    log_joint,
    naive_bayes_predict_proba,
    predict,
    predict_proba,
    weighted_nb_predict_proba,
)
from ciber.data import Dataset, FeatureType, stratified_split
from ciber.distribution import ConditionalTable
from ciber.errors import CorruptModel, DimensionMismatch, SingleClass, UnknownClass, VersionMismatch
from ciber.partition import Partition
from ciber.simulate import SegmentSpec, gen_segments

from conftest import random_dataset, worked_example_model

X1 = [10.0, 30.0]
X2 = [55.0, 35.0]


def model_from_counts(counts, alpha, groups):
    """A bare model around hand-made count tables (features already coded 0..K-1)."""
    table = ConditionalTable(tuple(np.asarray(c) for c in counts), alpha)
    d, n_classes = table.n_features, table.n_classes
    edges = tuple(
        classifier.BinEdges(np.arange(table.n_bins(i) - 1, dtype=float), "distinct", i) for i in range(d)
    )
    priors = table.class_totals / table.class_totals.sum()
    return classifier.CiberModel(
        tuple(str(k) for k in range(n_classes)),
        priors,
        edges,
        table,
        Partition(groups),
        tuple(f"f{i}" for i in range(d)),
        (FeatureType.CONTINUOUS,) * d,
        (None,) * d,
    )


# ------------------------------------------------------------------------- fit


def test_segment_pair_merges():
    ds = gen_segments(SegmentSpec(n_per_class=5000, seed=11))
    train, _ = stratified_split(ds, 0.2, 0)
    model = fit(train, FitConfig(bins=1000, threshold=0.2))
    assert model.partition.groups == ((0, 1),)
    assert model.partition.merges[0].distance < 0.2


def test_threshold_zero_is_all_singletons():
    ds = gen_segments(SegmentSpec(n_per_class=500, n_pairs=2, seed=1))
    assert fit(ds, FitConfig(threshold=0.0)).partition.groups == ((0,), (1,), (2,), (3,))


def test_single_class_rejected():
    ds = Dataset(np.arange(6.0).reshape(3, 2), [0, 0, 0], ("continuous",) * 2, ("a", "b"), ("0", "1"))
    with pytest.raises(SingleClass):
        fit(ds)


def test_priors_and_model_invariants():
    ds = gen_segments(SegmentSpec(n_per_class=300, seed=2))
    ds = ds.take(np.arange(400))  # 300 vs 100
    m = fit(ds, FitConfig(bins=20))
    assert m.priors.tolist() == [0.75, 0.25]
    assert m.partition.n_features == 2
    with pytest.raises(ValueError):
        m.priors[0] = 0.5


@pytest.mark.parametrize("scheme", ["equal_width", "mean_sigma", "mdlp"])
def test_discretizer_choices(scheme):
    ds = gen_segments(SegmentSpec(n_per_class=400, seed=4))
    m = fit(ds, FitConfig(discretizer=scheme, bins=12))
    assert all(e.scheme == scheme for e in m.edges)
    if scheme == "mean_sigma":
        assert all(e.n_bins == 8 for e in m.edges)
    assert predict(m, ds.X).shape == (ds.n,)


def test_rebalance_in_fit():
    ds = gen_segments(SegmentSpec(n_per_class=200, seed=4)).take(np.r_[0:200, 200:250])
    m = fit(ds, FitConfig(rebalance="over"))
    assert m.priors.tolist() == [0.5, 0.5]
    assert m.table.class_totals.tolist() == [200, 200]


def test_categorical_features_stay_independent():
    rng = np.random.default_rng(0)
    a = rng.integers(0, 3, size=200).astype(float)
    X = np.column_stack([a, a, a + rng.normal(scale=0.01, size=200)])
    ds = Dataset(
        X,
        (a > 0).astype(int),
        (FeatureType.CATEGORICAL, FeatureType.DISCRETE, FeatureType.CONTINUOUS),
        ("c", "d", "x"),
        ("0", "1"),
        (("p", "q", "r"), None, None),
    )
    m = fit(ds, FitConfig(threshold=0.5))
    assert (0,) in m.partition.groups
    assert (1, 2) in m.partition.groups
    assert m.edges[0].n_bins == 3


def test_constant_continuous_column_gets_one_bin():
    rng = np.random.default_rng(0)
    X = np.column_stack([rng.normal(size=50), np.full(50, 2.0)])
    ds = Dataset(X, np.arange(50) % 2, ("continuous", "continuous"), ("a", "b"), ("0", "1"))
    m = fit(ds)
    assert m.edges[1].n_bins == 1


# ------------------------------------------------------------ comonotone cells


def test_como_intervals_worked_example(worked_model):
    # class 0 at (10, 30): [0, 0.1] and [0, 0.1]
    assert como_cell_prob(worked_model, 0, (0, 1), (0, 2)) == pytest.approx(0.1, abs=1e-15)
    # class 0 at (55, 35): [0.5, 0.6] and [0.1, 0.2]
    assert como_cell_prob(worked_model, 0, (0, 1), (5, 3)) == 0.0
    # class 1 at (55, 35): [0.3, 0.4] and [0.3, 0.4]
    assert como_cell_prob(worked_model, 1, (0, 1), (5, 3)) == pytest.approx(0.1, abs=1e-15)
    # class 1 at (10, 30): empty interval and [0.2, 0.3]
    assert como_cell_prob(worked_model, 1, (0, 1), (0, 2)) == 0.0


def test_comonotone_measure():
    assert comonotone_measure([0, 0], [0.1, 0.1]) == pytest.approx(0.1)
    assert comonotone_measure([0.5, 0.1], [0.6, 0.2]) == 0.0
    assert comonotone_measure([0.3, 0.3], [0.4, 0.4]) == pytest.approx(0.1)


def test_como_unknown_class(worked_model):
    with pytest.raises(UnknownClass):
        como_cell_prob(worked_model, 2, (0, 1), (0, 0))


def test_smoothed_cell_formula():
    m = model_from_counts([[[3, 1, 0, 2]], [[1, 1, 4, 0]]], alpha=1.0, groups=((0, 1),))
    # class 0, codes (0, 2): count intervals (0,3] and (2,6] overlap by 1 of N_y = 6
    assert como_cell_prob(m, 0, (0, 1), (0, 2), smoothed=False) == pytest.approx(1 / 6)
    assert como_cell_prob(m, 0, (0, 1), (0, 2)) == pytest.approx((1 + 1) / (6 + 4))


random_tables = st.builds(
    lambda seed, n_feat, bins, alpha: (seed, n_feat, bins, alpha),
    st.integers(0, 100_000),
    st.integers(1, 3),
    st.integers(2, 6),
    st.sampled_from([0.0, 0.5, 1.0]),
)


def _random_model(seed, n_feat, bins, alpha):
    rng = np.random.default_rng(seed)
    n_y = int(rng.integers(1, 40))
    counts = []
    for _ in range(n_feat):
        k = int(rng.integers(2, bins + 1))
        c = np.zeros((2, k), dtype=int)
        for y in range(2):
            c[y] = np.bincount(rng.integers(0, k, size=n_y), minlength=k)
        counts.append(c)
    return model_from_counts(counts, alpha, (tuple(range(n_feat)),))


@settings(max_examples=60, deadline=None)
@given(random_tables)
def test_frechet_cells_sum_to_one_and_respect_upper_bound(params):
    m = _random_model(*params)
    t = m.table
    g = tuple(range(t.n_features))
    for y in range(2):
        total = 0.0
        for cell in itertools.product(*(range(t.n_bins(i)) for i in g)):
            raw = como_cell_prob(m, y, g, cell, smoothed=False)
            total += raw
            marginals = [t.counts[i][y, b] / t.class_totals[y] for i, b in zip(g, cell)]
            assert raw <= min(marginals) + 1e-15
        assert total == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(random_tables)
def test_singleton_cell_equals_marginal(params):
    m = _random_model(*params)
    t = m.table
    for y in range(2):
        for i in range(t.n_features):
            for b in range(t.n_bins(i)):
                assert como_cell_prob(m, y, (i,), (b,)) == t.prob(y, i, b)


# ---------------------------------------------------------------- prediction


def test_worked_example_posteriors(worked_model):
    assert predict_proba(worked_model, X1).tolist() == [1.0, 0.0]
    assert predict_proba(worked_model, X2).tolist() == [0.0, 1.0]
    assert naive_bayes_predict_proba(worked_model, X2).tolist() == [0.5, 0.5]
    assert predict(worked_model, X2) == 1
    assert predict(worked_model, X1) == 0


def test_tie_goes_to_lowest_class(worked_model):
    nb = dataclasses.replace(worked_model, partition=Partition.singletons(2))
    assert predict(nb, X2) == 0


def test_singleton_partition_matches_naive_bayes():
    rng = np.random.default_rng(5)
    ds = random_dataset(rng, 120, 4, n_classes=3)
    m = fit(ds, FitConfig(threshold=0.0))
    assert np.array_equal(predict_proba(m, ds.X), naive_bayes_predict_proba(m, ds.X))


def test_posteriors_sum_to_one():
    ds = gen_segments(SegmentSpec(n_per_class=400, n_pairs=2, seed=8))
    m = fit(ds, FitConfig(bins=50, threshold=0.3))
    p = predict_proba(m, ds.X)
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(p >= 0)


def test_log_domain_shift_invariance():
    ds = gen_segments(SegmentSpec(n_per_class=200, seed=9))
    m = fit(ds, FitConfig(bins=30))
    s = log_joint(m, ds.X)
    shifted = classifier._normalise(m, s + 123.0)
    assert np.allclose(shifted, classifier._normalise(m, s), atol=1e-12)
    assert np.array_equal(np.argmax(shifted, axis=1), predict(m, ds.X))


def test_dimension_mismatch(worked_model):
    with pytest.raises(DimensionMismatch):
        predict_proba(worked_model, [1.0, 2.0, 3.0])
    with pytest.raises(DimensionMismatch):
        weighted_nb_predict_proba(worked_model, [1.0], X1)


def test_all_zero_likelihood_falls_back_to_priors(worked_model):
    # X0 = 119 is impossible for class 0, X1 = 119 impossible for class 1
    assert predict_proba(worked_model, [119.0, 119.0]).tolist() == [0.5, 0.5]


# --------------------------------------------------------------- weighted NB


@pytest.fixture
def small_model():
    rng = np.random.default_rng(1)
    return fit(random_dataset(rng, 150, 2), FitConfig(threshold=0.0))


def test_unit_weights_are_naive_bayes(small_model):
    X = np.random.default_rng(2).normal(size=(30, 2))
    assert np.allclose(
        weighted_nb_predict_proba(small_model, [1, 1], X),
        naive_bayes_predict_proba(small_model, X),
        atol=1e-15,
    )


def test_zero_weights_give_priors(small_model):
    X = np.random.default_rng(2).normal(size=(5, 2))
    p = weighted_nb_predict_proba(small_model, [0, 0], X)
    assert np.allclose(p, small_model.priors, atol=1e-15)


def test_weight_two_equals_duplicated_feature():
    rng = np.random.default_rng(4)
    ds = random_dataset(rng, 200, 2)
    m = fit(ds, FitConfig(threshold=0.0))
    dup = Dataset(np.column_stack([ds.X[:, 0], ds.X[:, 0]]), ds.y, (FeatureType.CONTINUOUS,) * 2,
                  ("a", "a2"), ds.class_names)
    m_dup = fit(dup, FitConfig(threshold=0.0))
    X = rng.normal(size=(40, 2))
    assert np.allclose(
        weighted_nb_predict_proba(m, [2, 0], X),
        naive_bayes_predict_proba(m_dup, np.column_stack([X[:, 0], X[:, 0]])),
        atol=1e-12,
    )


# ------------------------------------------------------------ estimators / io


def test_estimator_wrappers():
    ds = gen_segments(SegmentSpec(n_per_class=1000, seed=3))
    train, test = stratified_split(ds, 0.2, 1)
    cib = CIBer(bins=100).fit(train)
    nb = NaiveBayes(bins=100).fit(train)
    assert np.mean(cib.predict(test.X) == test.y) > np.mean(nb.predict(test.X) == test.y)


def test_save_load_round_trip(tmp_path):
    ds = gen_segments(SegmentSpec(n_per_class=300, n_pairs=2, seed=3))
    m = fit(ds, FitConfig(bins=25, threshold=0.3, alpha=0.5))
    path = tmp_path / "m.json"
    classifier.save(m, path)
    back = classifier.load(path)
    X = np.random.default_rng(0).uniform(-10, 130, size=(200, 4))
    assert np.array_equal(predict_proba(m, X), predict_proba(back, X))
    assert back.partition == m.partition
    assert back.config == m.config
    doc = json.loads(path.read_text())
    assert {"version", "priors", "bin_edges", "counts", "alpha", "partition", "discretizer"} <= set(doc)


def test_truncated_model(tmp_path):
    ds = gen_segments(SegmentSpec(n_per_class=50, seed=3))
    path = tmp_path / "m.json"
    classifier.save(fit(ds), path)
    text = path.read_text()
    path.write_text(text[: len(text) // 2])
    with pytest.raises(CorruptModel):
        classifier.load(path)
    doc = json.loads(text)
    del doc["counts"]
    path.write_text(json.dumps(doc))
    with pytest.raises(CorruptModel):
        classifier.load(path)


def test_unknown_version(tmp_path):
    ds = gen_segments(SegmentSpec(n_per_class=50, seed=3))
    doc = classifier.to_dict(fit(ds))
    doc["version"] = 99
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(VersionMismatch):
        classifier.load(path)


def test_worked_model_builder_is_uniform():
    m = worked_example_model()
    for y in range(2):
        for i in range(2):
            probs = sorted(m.table.prob(y, i, b) for b in range(12))
            assert probs == [0.0, 0.0] + [0.1] * 10

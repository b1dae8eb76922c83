"""Comonotone-independence Bayesian classifier (CIBer)."""

from .classifier import (
    CIBer,
    CiberModel,
    FitConfig,
    NaiveBayes,
    como_cell_prob,
    fit,
    fit_naive_bayes,
    load,
    naive_bayes_predict_proba,
    predict,
    predict_proba,
    save,
    weighted_nb_predict_proba,
)
from .data import Dataset, FeatureType, load_csv, rebalance, stratified_split, subsample_fraction
from .discretize import BinEdges
from .partition import Partition
from .simulate import SegmentSpec, gen_segments

__version__ = "0.1.0"

"""Random forest of CART trees with fully derived per-tree randomness."""

from __future__ import annotations

import math
import time

import numpy as np

from .base import BaseEstimator, check_array, check_X_y, class_index
from .tree import grow_tree, tree_predict


class RandomForestClassifier(BaseEstimator):
    """Bagged Gini trees with per-split feature subsampling.

    Each tree's RNG comes from SeedSequence(seed, spawn_key=(tree_index,)),
    so the model is identical no matter how tree training is scheduled.
    features_per_split defaults to ceil(sqrt(n_features)); passing the full
    feature count (or disabling bootstrap with n_trees=1) reduces the
    forest to a plain CART tree.  Votes tie to the lowest class index.
    """

    def __init__(
        self,
        n_trees: int = 200,
        seed: int = 0,
        bootstrap: bool = True,
        features_per_split: int | None = None,
        max_depth: int | None = None,
        min_samples_split: int = 2,
    ):
        self.n_trees = n_trees
        self.seed = seed
        self.bootstrap = bootstrap
        self.features_per_split = features_per_split
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split

    def _n_candidate_features(self, n_features: int) -> int:
        if self.features_per_split is None:
            return min(n_features, math.ceil(math.sqrt(n_features)))
        if not 1 <= self.features_per_split <= n_features:
            raise ValueError(
                f"features_per_split must be in [1, {n_features}], "
                f"got {self.features_per_split}"
            )
        return self.features_per_split

    def fit(self, X, y) -> "RandomForestClassifier":
        start = time.perf_counter()
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        y_idx = class_index(y, self.classes_)
        n, d = X.shape
        m = self._n_candidate_features(d)

        self.trees_ = []
        for t in range(self.n_trees):
            rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(t,)))
            if self.bootstrap:
                sample = rng.integers(0, n, size=n)
                Xt, yt = X[sample], y_idx[sample]
            else:
                Xt, yt = X, y_idx
            if m == d:
                picker = None  # exhaustive search, no rng draw: exact CART reduction
            else:
                def picker(depth, _rng=rng, _d=d, _m=m):
                    return np.sort(_rng.permutation(_d)[:_m])

            self.trees_.append(
                grow_tree(
                    Xt,
                    yt,
                    len(self.classes_),
                    self.max_depth,
                    self.min_samples_split,
                    feature_picker=picker,
                )
            )
        self.training_time_ = time.perf_counter() - start
        return self

    def predict(self, X) -> np.ndarray:
        self._check_fitted()
        X = check_array(X)
        votes = np.zeros((len(X), len(self.classes_)), dtype=np.int64)
        rows = np.arange(len(X))
        for tree in self.trees_:
            votes[rows, tree_predict(tree, X)] += 1
        return self.classes_[np.argmax(votes, axis=1)]

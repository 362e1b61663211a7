"""k-nearest-neighbors classifier with explicit tie rules."""

from __future__ import annotations

import time

import numpy as np

from .base import BaseEstimator, check_array, check_X_y, class_index
from .preprocessing import StandardScaler

_CHUNK = 64  # test rows per distance block, caps the n_test x n_train buffer


class KNeighborsClassifier(BaseEstimator):
    """Euclidean k-NN over internally standardized inputs.

    Squared distances are computed as sum((a-b)^2), never the expanded
    dot-product form, so equal distances are exactly equal and the stated
    tie rules are reliable: equal distances rank by training-row order, and
    vote ties resolve to the lowest class index.
    """

    def __init__(self, k: int = 6, standardize: bool = True):
        self.k = k
        self.standardize = standardize

    def fit(self, X, y) -> "KNeighborsClassifier":
        start = time.perf_counter()
        X, y = check_X_y(X, y)
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.k > len(X):
            raise ValueError(f"k={self.k} exceeds training size {len(X)}")
        self.classes_ = np.unique(y)
        self.scaler_ = StandardScaler().fit(X) if self.standardize else None
        self.X_ = self.scaler_.transform(X) if self.scaler_ else X
        self.y_idx_ = class_index(y, self.classes_)
        self.training_time_ = time.perf_counter() - start
        return self

    def predict(self, X) -> np.ndarray:
        self._check_fitted()
        X = check_array(X)
        if self.scaler_ is not None:
            X = self.scaler_.transform(X)
        k, n_classes = self.k, len(self.classes_)
        out = np.empty(len(X), dtype=np.int64)
        for lo in range(0, len(X), _CHUNK):
            block = X[lo : lo + _CHUNK]
            diff = block[:, None, :] - self.X_[None, :, :]
            d2 = np.einsum("ijk,ijk->ij", diff, diff)
            # stable sort keeps lower training-row index first on exact ties
            nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
            for i, neigh in enumerate(nearest):
                votes = np.bincount(self.y_idx_[neigh], minlength=n_classes)
                out[lo + i] = np.argmax(votes)
        return self.classes_[out]

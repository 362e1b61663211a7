"""Feature standardization and stratified train/test splitting."""

from __future__ import annotations

import warnings

import numpy as np

from .base import BaseEstimator, check_array


class StandardScaler(BaseEstimator):
    """Per-feature z-score using training mean and population stddev.

    Zero-variance features transform to 0 in every set the scaler is
    applied to (they carry no information, and this keeps outputs finite).
    """

    def fit(self, X, y=None) -> "StandardScaler":
        X = check_array(X)
        if len(X) == 0:
            raise ValueError("cannot fit a scaler on an empty set")
        self.mean_ = X.mean(axis=0)
        self.scale_ = X.std(axis=0)  # population stddev (ddof=0)
        self.constant_ = self.scale_ == 0.0
        return self

    def transform(self, X) -> np.ndarray:
        self._check_fitted("mean_")
        X = check_array(X)
        safe = np.where(self.constant_, 1.0, self.scale_)
        out = (X - self.mean_) / safe
        out[:, self.constant_] = 0.0
        return out

    def fit_transform(self, X, y=None) -> np.ndarray:
        return self.fit(X).transform(X)


def stratified_split_indices(
    y, train_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic per-class split; returns (train_idx, test_idx).

    Per-class proportions are preserved to within one row (half-up
    rounding, clamped so a class with >=2 rows lands on both sides).  A
    single-row class cannot be split; it goes entirely to train with a
    warning.  Both index arrays come back sorted, so row order within each
    side matches the input.
    """
    if not 0.0 < train_fraction <= 1.0:
        raise ValueError(f"train_fraction must be in (0, 1], got {train_fraction}")
    y = np.asarray(y)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    train_parts: list[np.ndarray] = []
    test_parts: list[np.ndarray] = []
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        if train_fraction == 1.0:
            train_parts.append(idx)
            continue
        if len(idx) < 2:
            warnings.warn(
                f"class {cls} has {len(idx)} row(s); placing it entirely in train",
                stacklevel=2,
            )
            train_parts.append(idx)
            continue
        n_train = int(np.floor(train_fraction * len(idx) + 0.5))
        n_train = min(max(n_train, 1), len(idx) - 1)
        perm = rng.permutation(len(idx))
        train_parts.append(np.sort(idx[perm[:n_train]]))
        test_parts.append(np.sort(idx[perm[n_train:]]))
    train_idx = np.sort(np.concatenate(train_parts)) if train_parts else np.array([], dtype=np.int64)
    test_idx = np.sort(np.concatenate(test_parts)) if test_parts else np.array([], dtype=np.int64)
    return train_idx.astype(np.int64), test_idx.astype(np.int64)


def stratified_split(X, y, train_fraction: float, seed: int):
    """Split (X, y) into (X_train, y_train, X_test, y_test)."""
    X = np.asarray(X)
    y = np.asarray(y)
    train_idx, test_idx = stratified_split_indices(y, train_fraction, seed)
    return X[train_idx], y[train_idx], X[test_idx], y[test_idx]

"""Gaussian naive Bayes classifier."""

from __future__ import annotations

import time

import numpy as np

from .base import BaseEstimator, check_array, check_X_y


class GaussianNB(BaseEstimator):
    """Class-conditional independent Gaussians with frequency priors.

    Per-class feature variances are floored at `var_floor` so degenerate
    (constant) features keep densities finite.  Prediction is the argmax of
    log prior plus summed log densities; ties go to the lowest class index.
    """

    def __init__(self, var_floor: float = 1e-9):
        self.var_floor = var_floor

    def fit(self, X, y) -> "GaussianNB":
        start = time.perf_counter()
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        k, d = len(self.classes_), X.shape[1]
        self.theta_ = np.empty((k, d))
        self.var_ = np.empty((k, d))
        self.log_prior_ = np.empty(k)
        for i, cls in enumerate(self.classes_):
            rows = X[y == cls]
            self.theta_[i] = rows.mean(axis=0)
            self.var_[i] = np.maximum(rows.var(axis=0), self.var_floor)
            self.log_prior_[i] = np.log(len(rows) / len(X))
        self.training_time_ = time.perf_counter() - start
        return self

    def _joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        const = -0.5 * np.log(2.0 * np.pi * self.var_)  # (k, d)
        jll = np.empty((len(X), len(self.classes_)))
        for i in range(len(self.classes_)):
            sq = (X - self.theta_[i]) ** 2 / (2.0 * self.var_[i])
            jll[:, i] = self.log_prior_[i] + np.sum(const[i] - sq, axis=1)
        return jll

    def predict_log_joint(self, X) -> np.ndarray:
        self._check_fitted()
        return self._joint_log_likelihood(check_array(X))

    def predict_proba(self, X) -> np.ndarray:
        jll = self.predict_log_joint(X)
        jll -= jll.max(axis=1, keepdims=True)
        p = np.exp(jll)
        return p / p.sum(axis=1, keepdims=True)

    def predict(self, X) -> np.ndarray:
        jll = self.predict_log_joint(X)
        return self.classes_[np.argmax(jll, axis=1)]

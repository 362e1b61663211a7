"""Multinomial logistic regression trained by full-batch gradient descent."""

from __future__ import annotations

import time

import numpy as np

from .base import BaseEstimator, TrainingError, check_array, check_X_y, class_index
from .preprocessing import StandardScaler


def softmax(scores: np.ndarray) -> np.ndarray:
    """Row-wise stable softmax."""
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def softmax_loss_and_grad(
    W: np.ndarray, Xb: np.ndarray, Y: np.ndarray, l2: float
) -> tuple[float, np.ndarray]:
    """Mean cross-entropy with L2 on non-bias weights, and its gradient.

    W is (d+1, k) with the bias in row 0; Xb is X with a leading ones
    column; Y is one-hot (n, k).
    """
    n = len(Xb)
    P = softmax(Xb @ W)
    eps = np.finfo(np.float64).tiny
    loss = -np.sum(Y * np.log(P + eps)) / n
    loss += 0.5 * l2 * np.sum(W[1:] ** 2)
    grad = Xb.T @ (P - Y) / n
    grad[1:] += l2 * W[1:]
    return loss, grad


class LogisticRegression(BaseEstimator):
    """Softmax regression with bias, from zero weights, fixed step size.

    Inputs are standardized internally (the scaler is stored on the model
    so inference is self-contained).  Training aborts with TrainingError
    if the loss goes non-finite.
    """

    def __init__(
        self,
        learning_rate: float = 0.1,
        iterations: int = 500,
        l2: float = 1e-4,
        standardize: bool = True,
    ):
        self.learning_rate = learning_rate
        self.iterations = iterations
        self.l2 = l2
        self.standardize = standardize

    def _prepare(self, X: np.ndarray) -> np.ndarray:
        if self.scaler_ is not None:
            X = self.scaler_.transform(X)
        return np.hstack([np.ones((len(X), 1)), X])

    def fit(self, X, y) -> "LogisticRegression":
        start = time.perf_counter()
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        self.scaler_ = StandardScaler().fit(X) if self.standardize else None
        Xb = self._prepare(X)
        k = len(self.classes_)
        Y = np.zeros((len(X), k))
        Y[np.arange(len(X)), class_index(y, self.classes_)] = 1.0

        W = np.zeros((Xb.shape[1], k))
        losses = []
        for it in range(self.iterations):
            loss, grad = softmax_loss_and_grad(W, Xb, Y, self.l2)
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss at iteration {it}")
            losses.append(loss)
            W -= self.learning_rate * grad
        self.coef_ = W
        self.loss_curve_ = losses
        self.training_time_ = time.perf_counter() - start
        return self

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        Xb = self._prepare(check_array(X))
        return softmax(Xb @ self.coef_)

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

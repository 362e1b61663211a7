"""Gradient-boosted regression trees for multiclass classification.

One regression tree per class per round is fit to the softmax gradients
(one-vs-rest functional gradient boosting) using second-order statistics:
split gain and leaf weights follow the usual g/h formulation with an L2
term on leaf weights, and min_child_weight is enforced as the minimum sum
of hessians on each side of a split.  Scores start at the per-class log
priors, so a model with learning_rate 0 predicts the majority class
everywhere.  Training is deterministic: no row or feature subsampling.
"""

from __future__ import annotations

import time

import numpy as np

from .base import BaseEstimator, TrainingError, check_array, check_X_y, class_index

_LEAF = -1


def softmax_scores(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def multinomial_log_loss(scores: np.ndarray, y_idx: np.ndarray) -> float:
    """Mean negative log-likelihood of the true classes under softmax(scores)."""
    p = softmax_scores(scores)
    eps = np.finfo(np.float64).tiny
    return float(-np.mean(np.log(p[np.arange(len(y_idx)), y_idx] + eps)))


def softmax_grad_hess(
    scores: np.ndarray, y_idx: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Per-element gradient and hessian of summed NLL w.r.t. the scores.

    g[i, c] = p[i, c] - 1{y_i = c};  h[i, c] = p[i, c] * (1 - p[i, c]).
    """
    p = softmax_scores(scores)
    g = p.copy()
    g[np.arange(len(y_idx)), y_idx] -= 1.0
    h = p * (1.0 - p)
    return g, h


def _best_gain_split(
    X: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    rows: np.ndarray,
    reg_lambda: float,
    min_child_weight: float,
) -> tuple[int, float] | None:
    """Maximize the standard second-order split gain; ties keep the first
    (lowest feature index, then lowest threshold) candidate."""
    g_tot = float(g[rows].sum())
    h_tot = float(h[rows].sum())
    parent = g_tot * g_tot / (h_tot + reg_lambda)
    best_gain = 0.0
    best: tuple[int, float] | None = None
    for f in range(X.shape[1]):
        col = X[rows, f]
        order = np.argsort(col)
        sc = col[order]
        boundary = np.flatnonzero(sc[1:] != sc[:-1])
        if len(boundary) == 0:
            continue
        thr = (sc[boundary] + sc[boundary + 1]) / 2.0
        valid = thr < sc[boundary + 1]
        boundary, thr = boundary[valid], thr[valid]
        if len(boundary) == 0:
            continue
        g_cum = np.cumsum(g[rows][order])
        h_cum = np.cumsum(h[rows][order])
        g_l, h_l = g_cum[boundary], h_cum[boundary]
        g_r, h_r = g_tot - g_l, h_tot - h_l
        ok = (h_l >= min_child_weight) & (h_r >= min_child_weight)
        gain = (
            g_l * g_l / (h_l + reg_lambda)
            + g_r * g_r / (h_r + reg_lambda)
            - parent
        )
        gain[~ok] = -np.inf
        i = int(np.argmax(gain))
        if gain[i] > best_gain:
            best_gain = float(gain[i])
            best = (int(f), float(thr[i]))
    return best


def _grow_regression_tree(
    X: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    max_depth: int,
    reg_lambda: float,
    min_child_weight: float,
) -> dict[str, np.ndarray]:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    weight: list[float] = []

    def add(feat: int, thr: float, w: float) -> int:
        feature.append(feat)
        threshold.append(thr)
        left.append(_LEAF)
        right.append(_LEAF)
        weight.append(w)
        return len(feature) - 1

    stack: list[tuple[np.ndarray, int, int, bool]] = [
        (np.arange(len(X)), 0, -1, False)
    ]
    while stack:
        rows, depth, parent, is_left = stack.pop()
        split = None
        if depth < max_depth and len(rows) >= 2:
            split = _best_gain_split(X, g, h, rows, reg_lambda, min_child_weight)
        if split is None:
            w = -float(g[rows].sum()) / (float(h[rows].sum()) + reg_lambda)
            node = add(_LEAF, 0.0, w)
        else:
            f, thr = split
            node = add(f, thr, 0.0)
        if parent >= 0:
            if is_left:
                left[parent] = node
            else:
                right[parent] = node
        if split is not None:
            f, thr = split
            mask = X[rows, f] <= thr
            stack.append((rows[~mask], depth + 1, node, False))
            stack.append((rows[mask], depth + 1, node, True))
    return {
        "feature": np.asarray(feature, dtype=np.int64),
        "threshold": np.asarray(threshold, dtype=np.float64),
        "left": np.asarray(left, dtype=np.int64),
        "right": np.asarray(right, dtype=np.int64),
        "weight": np.asarray(weight, dtype=np.float64),
    }


def _regression_tree_predict(tree: dict[str, np.ndarray], X: np.ndarray) -> np.ndarray:
    out = np.zeros(len(X))
    if len(X) == 0:
        return out
    feature, threshold = tree["feature"], tree["threshold"]
    left, right, weight = tree["left"], tree["right"], tree["weight"]
    stack = [(0, np.arange(len(X)))]
    while stack:
        node, rows = stack.pop()
        if len(rows) == 0:
            continue
        if feature[node] == _LEAF:
            out[rows] = weight[node]
            continue
        mask = X[rows, feature[node]] <= threshold[node]
        stack.append((int(left[node]), rows[mask]))
        stack.append((int(right[node]), rows[~mask]))
    return out


class GradientBoostingClassifier(BaseEstimator):
    def __init__(
        self,
        n_rounds: int = 100,
        learning_rate: float = 0.3,
        max_depth: int = 3,
        min_child_weight: float = 1.0,
        reg_lambda: float = 1.0,
    ):
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.min_child_weight = min_child_weight
        self.reg_lambda = reg_lambda

    def fit(self, X, y) -> "GradientBoostingClassifier":
        start = time.perf_counter()
        if self.n_rounds < 1:
            raise ValueError("n_rounds must be >= 1")
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        y_idx = class_index(y, self.classes_)
        n, k = len(X), len(self.classes_)

        priors = np.bincount(y_idx, minlength=k) / n
        self.base_score_ = np.log(priors)  # all classes present by construction
        scores = np.tile(self.base_score_, (n, 1))

        self.rounds_: list[list[dict[str, np.ndarray]]] = []
        self.loss_curve_ = [multinomial_log_loss(scores, y_idx)]
        for r in range(self.n_rounds):
            g, h = softmax_grad_hess(scores, y_idx)
            round_trees = []
            for c in range(k):
                tree = _grow_regression_tree(
                    X,
                    g[:, c],
                    h[:, c],
                    self.max_depth,
                    self.reg_lambda,
                    self.min_child_weight,
                )
                round_trees.append(tree)
                scores[:, c] += self.learning_rate * _regression_tree_predict(tree, X)
            self.rounds_.append(round_trees)
            loss = multinomial_log_loss(scores, y_idx)
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss at round {r}")
            self.loss_curve_.append(loss)
        self.training_time_ = time.perf_counter() - start
        return self

    def decision_scores(self, X) -> np.ndarray:
        self._check_fitted()
        X = check_array(X)
        scores = np.tile(self.base_score_, (len(X), 1))
        for round_trees in self.rounds_:
            for c, tree in enumerate(round_trees):
                scores[:, c] += self.learning_rate * _regression_tree_predict(tree, X)
        return scores

    def predict_proba(self, X) -> np.ndarray:
        return softmax_scores(self.decision_scores(X))

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self.decision_scores(X), axis=1)]

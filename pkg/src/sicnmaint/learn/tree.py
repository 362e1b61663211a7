"""CART decision tree with exhaustive midpoint split search.

Split selection scans every candidate feature in ascending index order and
every midpoint between consecutive distinct sorted values in ascending
threshold order, minimizing weighted Gini impurity with strict improvement,
so ties resolve to the lowest feature index and then the lowest threshold.
Leaves predict the majority class, ties to the lowest class index.

The Gini expression is evaluated in a fixed operation order (per-class
sequential accumulation) from exact integer counts, so independently coded
scorers that follow the same definition produce bit-identical values.
"""

from __future__ import annotations

import time

import numpy as np

from .base import BaseEstimator, check_array, check_X_y, class_index

_LEAF = -1


def _gini_scores(counts_l, n_l, counts_r, n_r, n) -> np.ndarray:
    """Weighted Gini for candidate splits, vectorized over candidates."""
    k = counts_l.shape[1]
    acc_l = np.zeros(len(counts_l))
    acc_r = np.zeros(len(counts_r))
    for c in range(k):
        acc_l += (counts_l[:, c] / n_l) ** 2
        acc_r += (counts_r[:, c] / n_r) ** 2
    g_l = 1.0 - acc_l
    g_r = 1.0 - acc_r
    return (n_l / n) * g_l + (n_r / n) * g_r


def best_gini_split(
    X: np.ndarray, onehot: np.ndarray, rows: np.ndarray, feat_ids
) -> tuple[int, float] | None:
    """Best (feature, threshold) by weighted Gini over the given rows.

    Returns None when no candidate separates the rows.  The left branch
    takes x <= threshold.
    """
    n = len(rows)
    sub = onehot[rows]
    total = sub.sum(axis=0)
    best_score = np.inf
    best: tuple[int, float] | None = None
    for f in feat_ids:
        col = X[rows, f]
        order = np.argsort(col)
        sc = col[order]
        boundary = np.flatnonzero(sc[1:] != sc[:-1])
        if len(boundary) == 0:
            continue
        thr = (sc[boundary] + sc[boundary + 1]) / 2.0
        # A midpoint can collapse onto the right value for adjacent floats;
        # such a candidate would not partition the way the counts assume.
        valid = thr < sc[boundary + 1]
        if not valid.all():
            boundary = boundary[valid]
            thr = thr[valid]
            if len(boundary) == 0:
                continue
        cum = np.cumsum(sub[order], axis=0)
        counts_l = cum[boundary]
        counts_r = total - counts_l
        n_l = (boundary + 1).astype(np.float64)
        n_r = n - n_l
        scores = _gini_scores(counts_l, n_l, counts_r, n_r, float(n))
        i = int(np.argmin(scores))  # first minimum: lowest threshold wins
        if scores[i] < best_score:
            best_score = float(scores[i])
            best = (int(f), float(thr[i]))
    return best


class _TreeArrays:
    """Flat tree storage: internal nodes carry (feature, threshold, children),
    leaves carry a class-index payload in `value`."""

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[int] = []

    def add_leaf(self, value: int) -> int:
        self.feature.append(_LEAF)
        self.threshold.append(0.0)
        self.left.append(_LEAF)
        self.right.append(_LEAF)
        self.value.append(int(value))
        return len(self.feature) - 1

    def add_split(self, feature: int, threshold: float) -> int:
        self.feature.append(int(feature))
        self.threshold.append(float(threshold))
        self.left.append(_LEAF)
        self.right.append(_LEAF)
        self.value.append(_LEAF)
        return len(self.feature) - 1

    def finalize(self) -> dict[str, np.ndarray]:
        return {
            "feature": np.asarray(self.feature, dtype=np.int64),
            "threshold": np.asarray(self.threshold, dtype=np.float64),
            "left": np.asarray(self.left, dtype=np.int64),
            "right": np.asarray(self.right, dtype=np.int64),
            "value": np.asarray(self.value, dtype=np.int64),
        }


def grow_tree(
    X: np.ndarray,
    y_idx: np.ndarray,
    n_classes: int,
    max_depth: int | None,
    min_samples_split: int,
    feature_picker=None,
) -> dict[str, np.ndarray]:
    """Grow a classification tree and return its flat array form.

    `feature_picker(depth)` returns the candidate feature ids for a node
    (ascending); None means all features at every node.
    """
    onehot = np.zeros((len(X), n_classes))
    onehot[np.arange(len(X)), y_idx] = 1.0
    arrays = _TreeArrays()
    all_features = np.arange(X.shape[1])

    def majority(rows: np.ndarray) -> int:
        counts = onehot[rows].sum(axis=0)
        return int(np.argmax(counts))

    # (rows, depth, parent_slot, is_left); parent -1 creates the root
    stack: list[tuple[np.ndarray, int, int, bool]] = [
        (np.arange(len(X)), 0, -1, False)
    ]
    while stack:
        rows, depth, parent, is_left = stack.pop()
        y_here = y_idx[rows]
        pure = bool((y_here == y_here[0]).all())
        stop = (
            pure
            or len(rows) < min_samples_split
            or (max_depth is not None and depth >= max_depth)
        )
        split = None
        if not stop:
            feats = all_features if feature_picker is None else feature_picker(depth)
            split = best_gini_split(X, onehot, rows, feats)
        if split is None:
            node = arrays.add_leaf(majority(rows))
        else:
            f, thr = split
            node = arrays.add_split(f, thr)
        if parent >= 0:
            if is_left:
                arrays.left[parent] = node
            else:
                arrays.right[parent] = node
        if split is not None:
            f, thr = split
            mask = X[rows, f] <= thr
            # push right first so the left child is built (and numbered) first
            stack.append((rows[~mask], depth + 1, node, False))
            stack.append((rows[mask], depth + 1, node, True))
    return arrays.finalize()


def tree_predict(tree: dict[str, np.ndarray], X: np.ndarray) -> np.ndarray:
    """Vectorized batch traversal; returns class indices."""
    out = np.empty(len(X), dtype=np.int64)
    if len(X) == 0:
        return out
    feature, threshold = tree["feature"], tree["threshold"]
    left, right, value = tree["left"], tree["right"], tree["value"]
    stack = [(0, np.arange(len(X)))]
    while stack:
        node, rows = stack.pop()
        if len(rows) == 0:
            continue
        if feature[node] == _LEAF:
            out[rows] = value[node]
            continue
        mask = X[rows, feature[node]] <= threshold[node]
        stack.append((int(left[node]), rows[mask]))
        stack.append((int(right[node]), rows[~mask]))
    return out


class DecisionTreeClassifier(BaseEstimator):
    def __init__(self, max_depth: int | None = None, min_samples_split: int = 2):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split

    def fit(self, X, y) -> "DecisionTreeClassifier":
        start = time.perf_counter()
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        y_idx = class_index(y, self.classes_)
        self.tree_ = grow_tree(
            X, y_idx, len(self.classes_), self.max_depth, self.min_samples_split
        )
        self.training_time_ = time.perf_counter() - start
        return self

    def predict(self, X) -> np.ndarray:
        self._check_fitted()
        X = check_array(X)
        return self.classes_[tree_predict(self.tree_, X)]

"""Classification metrics: accuracy, per-class precision/recall/F1, macro-F1."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class EvalMetrics:
    accuracy: float
    macro_f1: float
    class_set: list
    precision: list[float]
    recall: list[float]
    f1: list[float]
    confusion: np.ndarray  # (k, k), rows true, columns predicted
    n_test: int
    training_time: float = 0.0

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "class_set": [int(c) for c in self.class_set],
            "precision": list(self.precision),
            "recall": list(self.recall),
            "f1": list(self.f1),
            "confusion": self.confusion.tolist(),
            "n_test": self.n_test,
            "training_time": self.training_time,
        }


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def evaluate_predictions(y_true, y_pred, class_set) -> EvalMetrics:
    """Metrics over an explicit class set.

    Per-class F1 is the harmonic mean of precision and recall with 0/0
    defined as 0; macro-F1 is the unweighted mean over class_set, so
    classes absent from the test set still contribute a 0.  Labels outside
    class_set are rejected.
    """
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if len(y_true) == 0:
        raise ValueError("test set is empty")
    if len(y_true) != len(y_pred):
        raise ValueError("y_true and y_pred disagree on length")
    classes = list(class_set)
    pos = {c: i for i, c in enumerate(classes)}
    k = len(classes)
    confusion = np.zeros((k, k), dtype=np.int64)
    for t, p in zip(y_true.tolist(), y_pred.tolist()):
        if t not in pos:
            raise ValueError(f"true label {t!r} outside class set {classes}")
        if p not in pos:
            raise ValueError(f"predicted label {p!r} outside class set {classes}")
        confusion[pos[t], pos[p]] += 1

    precision, recall, f1 = [], [], []
    for i in range(k):
        tp = float(confusion[i, i])
        prec = _safe_div(tp, float(confusion[:, i].sum()))
        rec = _safe_div(tp, float(confusion[i, :].sum()))
        precision.append(prec)
        recall.append(rec)
        f1.append(_safe_div(2.0 * prec * rec, prec + rec))

    return EvalMetrics(
        accuracy=float(np.trace(confusion)) / float(len(y_true)),
        macro_f1=float(np.mean(f1)),
        class_set=classes,
        precision=precision,
        recall=recall,
        f1=f1,
        confusion=confusion,
        n_test=len(y_true),
    )


def evaluate(model, X_test, y_test, class_set=None) -> EvalMetrics:
    """Evaluate a fitted model; class_set defaults to the model's classes."""
    if class_set is None:
        class_set = [int(c) for c in model.classes_]
    metrics = evaluate_predictions(y_test, model.predict(X_test), class_set)
    metrics.training_time = float(getattr(model, "training_time_", 0.0))
    return metrics

import numpy as np
import pytest

from sicnmaint.learn.metrics import evaluate, evaluate_predictions
from sicnmaint.learn.naive_bayes import GaussianNB


def test_hand_computed_example():
    m = evaluate_predictions(["A", "A", "B", "B"], ["A", "B", "B", "B"], ["A", "B"])
    assert m.accuracy == 0.75
    assert m.macro_f1 == pytest.approx((2.0 / 3.0 + 4.0 / 5.0) / 2.0, abs=1e-9)
    assert m.precision == [1.0, pytest.approx(2.0 / 3.0)]
    assert m.recall == [0.5, 1.0]


def test_perfect_predictions():
    m = evaluate_predictions([0, 1, 2], [0, 1, 2], [0, 1, 2])
    assert m.accuracy == 1.0
    assert m.macro_f1 == 1.0


def test_absent_class_contributes_zero_f1():
    m = evaluate_predictions([0, 0], [0, 0], [0, 1, 2])
    assert m.f1 == [1.0, 0.0, 0.0]
    assert m.macro_f1 == pytest.approx(1.0 / 3.0)


def test_confusion_matrix_identities():
    m = evaluate_predictions([0, 0, 1, 1, 2], [0, 1, 1, 1, 0], [0, 1, 2])
    assert m.confusion.sum() == m.n_test == 5
    assert m.accuracy == np.trace(m.confusion) / m.confusion.sum()
    assert m.confusion[0, 1] == 1  # true 0 predicted 1


def test_labels_outside_class_set_rejected():
    with pytest.raises(ValueError):
        evaluate_predictions([0, 3], [0, 0], [0, 1])
    with pytest.raises(ValueError):
        evaluate_predictions([0, 0], [0, 9], [0, 1])


def test_empty_test_set_rejected():
    with pytest.raises(ValueError):
        evaluate_predictions([], [], [0, 1])


def test_relabeling_permutation_invariance(rng):
    for _ in range(30):
        k = int(rng.integers(2, 6))
        n = int(rng.integers(4, 60))
        y_true = rng.integers(0, k, size=n)
        y_pred = rng.integers(0, k, size=n)
        base = evaluate_predictions(y_true, y_pred, list(range(k)))
        perm = rng.permutation(k)
        m2 = evaluate_predictions(perm[y_true], perm[y_pred], list(range(k)))
        assert abs(base.macro_f1 - m2.macro_f1) <= 1e-12
        assert base.accuracy == m2.accuracy


def test_evaluate_uses_model_classes(rng):
    X = rng.normal(size=(30, 2))
    y = rng.integers(0, 3, size=30)
    y[:3] = [0, 1, 2]
    model = GaussianNB().fit(X, y)
    m = evaluate(model, X, y)
    assert m.class_set == [0, 1, 2]
    assert m.training_time == model.training_time_
    assert 0.0 <= m.accuracy <= 1.0

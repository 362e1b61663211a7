import numpy as np

from oracles import cart_oracle
from sicnmaint.learn.tree import DecisionTreeClassifier


def test_separable_depth_one():
    X = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    y = np.array([0, 0, 1, 1])
    model = DecisionTreeClassifier().fit(X, y)
    tree = model.tree_
    assert (tree["feature"] != -1).sum() == 1  # single split
    thr = tree["threshold"][tree["feature"] != -1][0]
    assert -1.0 < thr < 1.0
    assert list(model.predict(X)) == [0, 0, 1, 1]


def test_single_class_is_a_lone_leaf():
    X = np.array([[1.0], [2.0], [3.0]])
    y = np.array([5, 5, 5])
    model = DecisionTreeClassifier().fit(X, y)
    assert len(model.tree_["feature"]) == 1
    assert model.predict([[99.0]])[0] == 5


def test_max_depth_limits_growth():
    X = np.arange(8, dtype=float).reshape(-1, 1)
    y = np.array([0, 1, 0, 1, 0, 1, 0, 1])
    stump = DecisionTreeClassifier(max_depth=1).fit(X, y)
    internal = (stump.tree_["feature"] != -1).sum()
    assert internal == 1
    full = DecisionTreeClassifier().fit(X, y)
    assert (full.predict(X) == y).all()


def test_min_samples_split():
    X = np.array([[0.0], [1.0]])
    y = np.array([0, 1])
    model = DecisionTreeClassifier(min_samples_split=3).fit(X, y)
    assert len(model.tree_["feature"]) == 1  # may not split two rows


def test_tie_breaks_prefer_lowest_feature():
    # identical split quality available on both features
    X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
    y = np.array([0, 0, 1, 1])
    model = DecisionTreeClassifier().fit(X, y)
    split_features = model.tree_["feature"][model.tree_["feature"] != -1]
    assert split_features[0] == 0


def test_matches_bruteforce_oracle_on_random_instances(rng):
    for trial in range(60):
        n = int(rng.integers(2, 9))
        d = int(rng.integers(1, 3))
        k = int(rng.integers(2, 4))
        # small integer grid makes impurity ties common
        X = rng.integers(0, 4, size=(n, d)).astype(float)
        y = rng.integers(0, k, size=n)
        max_depth = None if rng.random() < 0.5 else int(rng.integers(1, 4))
        model = DecisionTreeClassifier(max_depth=max_depth).fit(X, y)
        oracle = cart_oracle(X.tolist(), y.tolist(), max_depth=max_depth)
        queries = np.vstack([X, rng.integers(-1, 5, size=(10, d)).astype(float)])
        mine = model.predict(queries)
        theirs = [oracle(q.tolist()) for q in queries]
        assert list(mine) == theirs, f"trial {trial}"


def test_predict_is_batch_consistent(rng):
    X = rng.normal(size=(40, 3))
    y = rng.integers(0, 3, size=40)
    y[:3] = [0, 1, 2]
    model = DecisionTreeClassifier().fit(X, y)
    batch = model.predict(X)
    single = np.array([model.predict(row.reshape(1, -1))[0] for row in X])
    assert np.array_equal(batch, single)

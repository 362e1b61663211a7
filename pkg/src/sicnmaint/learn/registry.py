"""Model construction from declarative specs and versioned JSON persistence."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .base import BaseEstimator
from .boosting import GradientBoostingClassifier
from .forest import RandomForestClassifier
from .linear import LogisticRegression
from .naive_bayes import GaussianNB
from .neighbors import KNeighborsClassifier
from .preprocessing import StandardScaler
from .tree import DecisionTreeClassifier

FORMAT_VERSION = 1

ALGORITHMS: dict[str, type[BaseEstimator]] = {
    "gaussian_nb": GaussianNB,
    "logistic": LogisticRegression,
    "cart": DecisionTreeClassifier,
    "random_forest": RandomForestClassifier,
    "knn": KNeighborsClassifier,
    "gradient_boost": GradientBoostingClassifier,
}


@dataclass
class ModelSpec:
    """Algorithm id plus hyperparameters and a seed; validated on construction."""

    algorithm: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(
                f"unknown algorithm {self.algorithm!r}; supported: {sorted(ALGORITHMS)}"
            )
        valid = ALGORITHMS[self.algorithm]._param_names()
        unknown = sorted(set(self.hyperparameters) - set(valid))
        if unknown:
            raise ValueError(
                f"unknown hyperparameters for {self.algorithm}: {unknown}; "
                f"valid: {sorted(valid)}"
            )


def build_model(spec: ModelSpec) -> BaseEstimator:
    """Instantiate the estimator for a spec (seed wired in where supported)."""
    cls = ALGORITHMS[spec.algorithm]
    params = dict(spec.hyperparameters)
    if "seed" in cls._param_names() and "seed" not in params:
        params["seed"] = spec.seed
    return cls(**params)


def _algorithm_of(model: BaseEstimator) -> str:
    for name, cls in ALGORITHMS.items():
        if type(model) is cls:
            return name
    raise ValueError(f"unregistered model type {type(model).__name__}")


def _tree_to_lists(tree: dict[str, np.ndarray]) -> dict[str, list]:
    return {key: arr.tolist() for key, arr in tree.items()}


def _tree_from_lists(tree: dict[str, list]) -> dict[str, np.ndarray]:
    out = {}
    for key, values in tree.items():
        dtype = np.float64 if key in ("threshold", "weight") else np.int64
        out[key] = np.asarray(values, dtype=dtype)
    return out


def _scaler_to_dict(scaler: StandardScaler | None) -> dict | None:
    if scaler is None:
        return None
    return {"mean": scaler.mean_.tolist(), "scale": scaler.scale_.tolist()}


def _scaler_from_dict(doc: dict | None) -> StandardScaler | None:
    if doc is None:
        return None
    scaler = StandardScaler()
    scaler.mean_ = np.asarray(doc["mean"], dtype=np.float64)
    scaler.scale_ = np.asarray(doc["scale"], dtype=np.float64)
    scaler.constant_ = scaler.scale_ == 0.0
    return scaler


def model_to_dict(model: BaseEstimator, include_timing: bool = True) -> dict:
    algorithm = _algorithm_of(model)
    state: dict
    if isinstance(model, GaussianNB):
        state = {
            "theta": model.theta_.tolist(),
            "var": model.var_.tolist(),
            "log_prior": model.log_prior_.tolist(),
        }
    elif isinstance(model, LogisticRegression):
        state = {
            "coef": model.coef_.tolist(),
            "scaler": _scaler_to_dict(model.scaler_),
        }
    elif isinstance(model, DecisionTreeClassifier):
        state = {"tree": _tree_to_lists(model.tree_)}
    elif isinstance(model, RandomForestClassifier):
        state = {"trees": [_tree_to_lists(t) for t in model.trees_]}
    elif isinstance(model, KNeighborsClassifier):
        state = {
            "X": model.X_.tolist(),
            "y_idx": model.y_idx_.tolist(),
            "scaler": _scaler_to_dict(model.scaler_),
        }
    elif isinstance(model, GradientBoostingClassifier):
        state = {
            "base_score": model.base_score_.tolist(),
            "rounds": [[_tree_to_lists(t) for t in rt] for rt in model.rounds_],
        }
    else:  # pragma: no cover - registry and branches kept in sync
        raise ValueError(f"cannot serialize {type(model).__name__}")
    return {
        "format_version": FORMAT_VERSION,
        "algorithm": algorithm,
        "params": model.get_params(),
        "classes": [int(c) for c in model.classes_],
        "training_time": float(getattr(model, "training_time_", 0.0)) if include_timing else 0.0,
        "state": state,
    }


def model_from_dict(doc: dict) -> BaseEstimator:
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {doc.get('format_version')!r}")
    algorithm = doc["algorithm"]
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r} in model document")
    model = ALGORITHMS[algorithm](**doc["params"])
    model.classes_ = np.asarray(doc["classes"], dtype=np.int64)
    model.training_time_ = float(doc.get("training_time", 0.0))
    state = doc["state"]
    if isinstance(model, GaussianNB):
        model.theta_ = np.asarray(state["theta"], dtype=np.float64)
        model.var_ = np.asarray(state["var"], dtype=np.float64)
        model.log_prior_ = np.asarray(state["log_prior"], dtype=np.float64)
    elif isinstance(model, LogisticRegression):
        model.coef_ = np.asarray(state["coef"], dtype=np.float64)
        model.scaler_ = _scaler_from_dict(state["scaler"])
    elif isinstance(model, DecisionTreeClassifier):
        model.tree_ = _tree_from_lists(state["tree"])
    elif isinstance(model, RandomForestClassifier):
        model.trees_ = [_tree_from_lists(t) for t in state["trees"]]
    elif isinstance(model, KNeighborsClassifier):
        model.X_ = np.asarray(state["X"], dtype=np.float64)
        model.y_idx_ = np.asarray(state["y_idx"], dtype=np.int64)
        model.scaler_ = _scaler_from_dict(state["scaler"])
    elif isinstance(model, GradientBoostingClassifier):
        model.base_score_ = np.asarray(state["base_score"], dtype=np.float64)
        model.rounds_ = [[_tree_from_lists(t) for t in rt] for rt in state["rounds"]]
    return model


def save_model(model: BaseEstimator, path, include_timing: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model, include_timing=include_timing), fh)
        fh.write("\n")


def load_model(path) -> BaseEstimator:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))

from .base import BaseEstimator, NotFittedError, TrainingError, check_array, check_X_y, derive_seed
from .preprocessing import StandardScaler, stratified_split, stratified_split_indices
from .naive_bayes import GaussianNB
from .linear import LogisticRegression, softmax, softmax_loss_and_grad
from .tree import DecisionTreeClassifier
from .forest import RandomForestClassifier
from .neighbors import KNeighborsClassifier
from .boosting import (
    GradientBoostingClassifier,
    multinomial_log_loss,
    softmax_grad_hess,
)
from .metrics import EvalMetrics, evaluate, evaluate_predictions
from .registry import (
    ALGORITHMS,
    ModelSpec,
    build_model,
    model_to_dict,
    model_from_dict,
    save_model,
    load_model,
)

__all__ = [
    "BaseEstimator",
    "NotFittedError",
    "TrainingError",
    "check_array",
    "check_X_y",
    "derive_seed",
    "StandardScaler",
    "stratified_split",
    "stratified_split_indices",
    "GaussianNB",
    "LogisticRegression",
    "softmax",
    "softmax_loss_and_grad",
    "DecisionTreeClassifier",
    "RandomForestClassifier",
    "KNeighborsClassifier",
    "GradientBoostingClassifier",
    "multinomial_log_loss",
    "softmax_grad_hess",
    "EvalMetrics",
    "evaluate",
    "evaluate_predictions",
    "ALGORITHMS",
    "ModelSpec",
    "build_model",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
]

"""Estimator plumbing: parameter introspection, input validation, seeds.

Estimators follow the scikit-learn protocol (constructor keyword
hyperparameters, fit(X, y) returning self, predict(X), get_params /
set_params) without importing scikit-learn, so they stay self-contained
while remaining clonable and grid-searchable by ecosystem tooling that
only relies on the protocol.

Conventions shared by every classifier here:
    * classes_ is the sorted array of labels seen in fit; predictions are
      values from classes_ and every argmax tie resolves to the lowest
      class index.
    * fit is deterministic given (params, seed, data); the only source of
      randomness is an explicit integer seed expanded with derive_seed.
    * training_time_ records wall-clock seconds spent inside fit.
"""

from __future__ import annotations

import hashlib
import inspect

import numpy as np


class NotFittedError(RuntimeError):
    pass


class TrainingError(RuntimeError):
    """Training diverged or hit a non-finite intermediate value."""


class BaseEstimator:
    """get_params/set_params over the constructor signature, sklearn-style."""

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [
            name
            for name, p in sig.parameters.items()
            if name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        ]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "BaseEstimator":
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"invalid parameter {name!r} for {type(self).__name__}; "
                    f"valid parameters: {sorted(valid)}"
                )
            setattr(self, name, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"

    def _check_fitted(self, attr: str = "classes_") -> None:
        if not hasattr(self, attr):
            raise NotFittedError(f"{type(self).__name__} is not fitted")


def check_array(X, name: str = "X") -> np.ndarray:
    """Coerce to a finite float64 2-D array."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    return X


def check_X_y(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = check_array(X)
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"y must be 1-dimensional, got shape {y.shape}")
    if len(y) != len(X):
        raise ValueError(f"X and y disagree on length: {len(X)} vs {len(y)}")
    if len(X) == 0:
        raise ValueError("training set is empty")
    return X, y.astype(np.int64)


def class_index(y: np.ndarray, classes: np.ndarray) -> np.ndarray:
    """Map labels to positions in the sorted class array."""
    idx = np.searchsorted(classes, y)
    bad = (idx >= len(classes)) | (classes[np.minimum(idx, len(classes) - 1)] != y)
    if np.any(bad):
        raise ValueError(f"labels outside class set: {sorted(set(y[bad].tolist()))}")
    return idx


def derive_seed(root: int, *labels) -> int:
    """Derive a stable 63-bit child seed from a root seed and a label path.

    Uses SHA-256 over the decimal root and the label reprs, so any stage of
    a pipeline can recompute its own seed from the experiment seed alone.
    """
    h = hashlib.sha256(str(int(root)).encode())
    for lab in labels:
        h.update(b"/")
        h.update(str(lab).encode())
    return int.from_bytes(h.digest()[:8], "big") >> 1

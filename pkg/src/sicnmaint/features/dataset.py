"""CSV persistence for labeled feature datasets.

Format: header `t,f01,f02,...,f37,label` (the label column is omitted for
unlabeled inference sets), one window per row.  Feature values are printed
with 9 significant digits; values already at that precision (counts and
short decimals) round-trip bit-identically, and a written file re-read and
re-written reproduces itself byte for byte.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .extract import FEATURE_NAMES, N_FEATURES, FeatureVector

_HEADER_LABELED = ["t"] + list(FEATURE_NAMES) + ["label"]
_HEADER_UNLABELED = ["t"] + list(FEATURE_NAMES)


class DatasetFormatError(ValueError):
    pass


@dataclass
class FeatureDataset:
    """A matrix view of feature vectors: t (window starts), X, optional y."""

    t: np.ndarray  # (n,) float64 window starts
    X: np.ndarray  # (n, 37) float64
    y: np.ndarray | None = None  # (n,) int64 labels, or None

    def __len__(self) -> int:
        return len(self.X)

    @property
    def class_set(self) -> list[int]:
        if self.y is None:
            return []
        return sorted(int(c) for c in np.unique(self.y))

    @classmethod
    def from_vectors(cls, vectors: Sequence[FeatureVector]) -> "FeatureDataset":
        t = np.array([fv.window_start for fv in vectors], dtype=np.float64)
        X = (
            np.vstack([fv.values for fv in vectors])
            if vectors
            else np.empty((0, N_FEATURES))
        )
        labels = [fv.label for fv in vectors]
        y = None
        if vectors and all(lab is not None for lab in labels):
            y = np.array(labels, dtype=np.int64)
        return cls(t=t, X=X, y=y)

    def subset(self, mask: np.ndarray) -> "FeatureDataset":
        return FeatureDataset(
            t=self.t[mask],
            X=self.X[mask],
            y=self.y[mask] if self.y is not None else None,
        )


def format_value(v: float) -> str:
    """Render one value with 9 significant digits (integers stay bare)."""
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return f"{v:.9g}"


def write_dataset(dataset: FeatureDataset, path) -> None:
    labeled = dataset.y is not None
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_HEADER_LABELED if labeled else _HEADER_UNLABELED)
        for i in range(len(dataset)):
            row = [format_value(float(dataset.t[i]))]
            row += [format_value(float(v)) for v in dataset.X[i]]
            if labeled:
                row.append(str(int(dataset.y[i])))
            writer.writerow(row)


def read_dataset(path) -> FeatureDataset:
    """Read a dataset CSV, rejecting malformed rows with their row number."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header == _HEADER_LABELED:
            labeled = True
        elif header == _HEADER_UNLABELED:
            labeled = False
        else:
            raise DatasetFormatError(f"unexpected dataset header: {header}")
        expected = len(header)
        ts: list[float] = []
        rows: list[list[float]] = []
        labels: list[int] = []
        for rownum, row in enumerate(reader, start=2):
            if len(row) != expected:
                raise DatasetFormatError(
                    f"row {rownum}: expected {expected} fields, got {len(row)}"
                )
            try:
                values = [float(v) for v in row[: N_FEATURES + 1]]
            except ValueError as exc:
                raise DatasetFormatError(f"row {rownum}: {exc}") from exc
            if not all(math.isfinite(v) for v in values):
                raise DatasetFormatError(f"row {rownum}: non-finite value")
            ts.append(values[0])
            rows.append(values[1:])
            if labeled:
                try:
                    labels.append(int(row[-1]))
                except ValueError as exc:
                    raise DatasetFormatError(f"row {rownum}: bad label") from exc
    return FeatureDataset(
        t=np.array(ts, dtype=np.float64),
        X=np.array(rows, dtype=np.float64).reshape(len(rows), N_FEATURES),
        y=np.array(labels, dtype=np.int64) if labeled else None,
    )

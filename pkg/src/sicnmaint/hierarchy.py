"""Two-step anomaly identification: intrusion detection, then fault
detection/localization, with a flat one-shot baseline for comparison.

Label spaces:
    step 1 (intrusion): 0 other, 1 code-red-i, 2 nimda, 3 slammer
    step 2 (fault):     0 normal, 1 outage-r1r2, 2 outage-r5r6
    flat (6-class):     0 normal, 1..3 worms, 4..5 outages

The combined window labeling produced by the featurizer already uses the
flat encoding, so the step datasets are projections of it: the intrusion
view keeps labels 0..3 (outage-tier windows belong to the fault view and
are excluded), and the fault view keeps labels {0, 4, 5} remapped to
{0, 1, 2}.  The flat baseline trains on the concatenation of both views
(shared normal windows appear once per view, mirroring a one-shot model
trained on the merged step corpora) and is evaluated per window on the
6-class labels, the same test set the composed pipeline is scored on.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .features.extract import FeatureVector, N_FEATURES
from .features.labels import CLASS_NAMES
from .learn.base import derive_seed
from .learn.metrics import EvalMetrics, evaluate_predictions
from .learn.preprocessing import stratified_split_indices
from .learn.registry import ModelSpec, build_model
from .simnet.topology import Topology

STEP1_CLASSES = (0, 1, 2, 3)
STEP2_CLASSES = (0, 1, 2)
FLAT_CLASSES = (0, 1, 2, 3, 4, 5)
FLAT_CLASS_NAMES = CLASS_NAMES

# tuned per-step hyperparameter defaults, overridable per experiment
DEFAULT_STEP_PARAMS: dict[str, tuple[dict, dict]] = {
    "knn": ({"k": 6}, {"k": 3}),
    "random_forest": ({"n_trees": 200}, {"n_trees": 60}),
    "gradient_boost": (
        {"max_depth": 3, "min_child_weight": 1.0},
        {"max_depth": 1, "min_child_weight": 3.0},
    ),
    "gaussian_nb": ({}, {}),
    "logistic": ({}, {}),
    "cart": ({}, {}),
}

_FAULT_LINK_ROUTERS = {1: ("R1", "R2"), 2: ("R5", "R6")}


class LabelDomainError(ValueError):
    pass


class TopologyMismatchError(ValueError):
    pass


@dataclass
class PipelineSpec:
    """Algorithm family plus per-step hyperparameters and the root seed."""

    algorithm: str
    step1_params: dict = field(default_factory=dict)
    step2_params: dict = field(default_factory=dict)
    flat_params: dict | None = None
    seed: int = 0

    def __post_init__(self):
        defaults = DEFAULT_STEP_PARAMS.get(self.algorithm, ({}, {}))
        self.step1_params = {**defaults[0], **self.step1_params}
        self.step2_params = {**defaults[1], **self.step2_params}
        if self.flat_params is None:
            self.flat_params = dict(self.step1_params)
        # validate eagerly: unknown algorithms/hyperparameters fail here
        ModelSpec(self.algorithm, self.step1_params, 0)
        ModelSpec(self.algorithm, self.step2_params, 0)
        ModelSpec(self.algorithm, self.flat_params, 0)


@dataclass(frozen=True)
class RootCause:
    link: str
    routers: tuple[str, str]
    components: tuple[tuple[str, str], ...]  # (router, interface id)


@dataclass(frozen=True)
class Diagnosis:
    verdict: str  # intrusion | fault | normal
    class_label: int  # step-1 class for intrusions, step-2 class for faults, 0 otherwise
    root_cause: RootCause | None
    identification_latency: float

    def __post_init__(self):
        if (self.verdict == "fault") != (self.root_cause is not None):
            raise ValueError("root_cause must be present iff the verdict is fault")
        if self.identification_latency < 0:
            raise ValueError("identification_latency must be >= 0")

    @property
    def flat_label(self) -> int:
        if self.verdict == "intrusion":
            return self.class_label
        if self.verdict == "fault":
            return self.class_label + 3
        return 0


@dataclass
class PipelineModel:
    algorithm: str
    step1: object
    step2: object
    step1_time: float = 0.0
    step2_time: float = 0.0
    step2_invocations: int = 0

    @property
    def training_time(self) -> float:
        return self.step1_time + self.step2_time


def intrusion_view(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Step-1 dataset: windows with combined labels 0..3, labels unchanged."""
    mask = np.isin(y, STEP1_CLASSES)
    return X[mask], y[mask]


def fault_view(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Step-2 dataset: windows with combined labels {0, 4, 5} as {0, 1, 2}."""
    mask = np.isin(y, (0, 4, 5))
    y2 = y[mask].copy()
    y2[y2 == 4] = 1
    y2[y2 == 5] = 2
    return X[mask], y2


def _check_domain(y: np.ndarray, allowed, step: str) -> None:
    bad = sorted(set(int(v) for v in np.unique(y)) - set(allowed))
    if bad:
        raise LabelDomainError(f"{step}: labels {bad} outside domain {list(allowed)}")


def train_pipeline(ni_train, na_train, spec: PipelineSpec) -> PipelineModel:
    """Train the two step models independently from their labeled datasets.

    ni_train and na_train are (X, y) pairs with labels in the step-1 and
    step-2 domains respectively.
    """
    X1, y1 = ni_train
    X2, y2 = na_train
    if len(np.asarray(X2)) == 0:
        raise LabelDomainError("step 2 training set is empty")
    if len(np.asarray(X1)) == 0:
        raise LabelDomainError("step 1 training set is empty")
    _check_domain(np.asarray(y1), STEP1_CLASSES, "step 1")
    _check_domain(np.asarray(y2), STEP2_CLASSES, "step 2")

    step1 = build_model(
        ModelSpec(spec.algorithm, spec.step1_params, derive_seed(spec.seed, "step1"))
    ).fit(X1, y1)
    step2 = build_model(
        ModelSpec(spec.algorithm, spec.step2_params, derive_seed(spec.seed, "step2"))
    ).fit(X2, y2)
    return PipelineModel(
        algorithm=spec.algorithm,
        step1=step1,
        step2=step2,
        step1_time=step1.training_time_,
        step2_time=step2.training_time_,
    )


def localize(step2_class: int, topology: Topology) -> RootCause:
    """Map a fault class to its link and the two terminating interfaces."""
    if step2_class not in _FAULT_LINK_ROUTERS:
        raise ValueError(f"step-2 class {step2_class} does not localize to a link")
    ra, rb = _FAULT_LINK_ROUTERS[step2_class]
    link = topology.link_between(ra, rb)
    if link is None:
        raise TopologyMismatchError(
            f"topology has no link between {ra} and {rb}; pipeline and topology disagree"
        )
    return RootCause(
        link=link.name,
        routers=(ra, rb),
        components=((ra, link.interface_of(ra)), (rb, link.interface_of(rb))),
    )


def _as_matrix(fv) -> np.ndarray:
    values = fv.values if isinstance(fv, FeatureVector) else np.asarray(fv, dtype=np.float64)
    if values.shape != (N_FEATURES,):
        raise ValueError(f"feature vector must have arity {N_FEATURES}")
    return values.reshape(1, -1)


def diagnose(pipeline: PipelineModel, fv, topology: Topology) -> Diagnosis:
    """Run the two-step decision path for one window.

    Step 2 runs only when step 1 reports class 0; the latency covers the
    full decision path.
    """
    start = time.perf_counter()
    row = _as_matrix(fv)
    label1 = int(pipeline.step1.predict(row)[0])
    if label1 != 0:
        return Diagnosis(
            verdict="intrusion",
            class_label=label1,
            root_cause=None,
            identification_latency=time.perf_counter() - start,
        )
    pipeline.step2_invocations += 1
    label2 = int(pipeline.step2.predict(row)[0])
    if label2 == 0:
        return Diagnosis(
            verdict="normal",
            class_label=0,
            root_cause=None,
            identification_latency=time.perf_counter() - start,
        )
    return Diagnosis(
        verdict="fault",
        class_label=label2,
        root_cause=localize(label2, topology),
        identification_latency=time.perf_counter() - start,
    )


def diagnose_stream(
    pipeline: PipelineModel, X, topology: Topology
) -> list[Diagnosis]:
    """Batched diagnosis of many windows (amortized per-window latency).

    Semantically identical to calling diagnose per row: step 2 only sees
    rows step 1 classified as 0, and the invocation counter advances by
    that row count.
    """
    X = np.asarray(X, dtype=np.float64)
    start = time.perf_counter()
    labels1 = pipeline.step1.predict(X)
    t1 = time.perf_counter() - start
    zero_rows = np.flatnonzero(labels1 == 0)
    labels2 = np.zeros(len(X), dtype=np.int64)
    t2 = 0.0
    if len(zero_rows):
        start2 = time.perf_counter()
        labels2[zero_rows] = pipeline.step2.predict(X[zero_rows])
        t2 = time.perf_counter() - start2
        pipeline.step2_invocations += len(zero_rows)

    lat1 = t1 / max(len(X), 1)
    lat2 = t2 / max(len(zero_rows), 1) if len(zero_rows) else 0.0
    causes = {c: localize(c, topology) for c in (1, 2)}
    out = []
    for i in range(len(X)):
        if labels1[i] != 0:
            out.append(
                Diagnosis("intrusion", int(labels1[i]), None, lat1)
            )
        elif labels2[i] == 0:
            out.append(Diagnosis("normal", 0, None, lat1 + lat2))
        else:
            out.append(
                Diagnosis("fault", int(labels2[i]), causes[int(labels2[i])], lat1 + lat2)
            )
    return out


def pipeline_flat_predictions(pipeline: PipelineModel, X) -> np.ndarray:
    """End-to-end 6-class predictions of the composed pipeline."""
    X = np.asarray(X, dtype=np.float64)
    labels1 = np.asarray(pipeline.step1.predict(X), dtype=np.int64)
    preds = labels1.copy()
    zero_rows = np.flatnonzero(labels1 == 0)
    if len(zero_rows):
        labels2 = np.asarray(pipeline.step2.predict(X[zero_rows]), dtype=np.int64)
        pipeline.step2_invocations += len(zero_rows)
        remap = labels2.copy()
        remap[labels2 == 1] = 4
        remap[labels2 == 2] = 5
        preds[zero_rows] = remap
    return preds


def evaluate_pipeline(pipeline: PipelineModel, X_test, y_test_flat) -> EvalMetrics:
    """Score the composed pipeline on 6-class window labels."""
    preds = pipeline_flat_predictions(pipeline, X_test)
    metrics = evaluate_predictions(np.asarray(y_test_flat), preds, list(FLAT_CLASSES))
    metrics.training_time = pipeline.training_time
    return metrics


def flat_training_corpus(ni_data, na_data) -> tuple[np.ndarray, np.ndarray]:
    """Merge step corpora into the one-shot 6-class training set.

    Step-1 labels pass through; step-2 labels 1/2 become 4/5 and label 0
    joins the shared normal class.  The incident label ranges must be
    disjoint after remapping (guaranteed by the fixed domains).
    """
    X1, y1 = ni_data
    X2, y2 = na_data
    X1 = np.asarray(X1, dtype=np.float64)
    X2 = np.asarray(X2, dtype=np.float64)
    y1 = np.asarray(y1, dtype=np.int64)
    y2 = np.asarray(y2, dtype=np.int64)
    _check_domain(y1, STEP1_CLASSES, "flat: intrusion data")
    _check_domain(y2, STEP2_CLASSES, "flat: fault data")
    y2r = y2.copy()
    y2r[y2 == 1] = 4
    y2r[y2 == 2] = 5
    return np.vstack([X1, X2]), np.concatenate([y1, y2r])


def run_flat(
    spec: PipelineSpec,
    ni_data,
    na_data,
    test: tuple[np.ndarray, np.ndarray] | None = None,
    train_fraction: float = 0.6,
):
    """Train and evaluate the flat one-shot baseline.

    With test=None the merged corpus is split with the module's standard
    stratified split (train_fraction, seed derived from the PipelineSpec seed);
    otherwise the model trains on the full merged corpus and is evaluated
    on the provided 6-class (X, y) test set.  Returns (EvalMetrics, model).
    """
    X, y = flat_training_corpus(ni_data, na_data)
    if test is None:
        tr, te = stratified_split_indices(y, train_fraction, derive_seed(spec.seed, "flat-split"))
        X_train, y_train, X_test, y_test = X[tr], y[tr], X[te], y[te]
    else:
        X_train, y_train = X, y
        X_test, y_test = np.asarray(test[0], dtype=np.float64), np.asarray(test[1], dtype=np.int64)
    model = build_model(
        ModelSpec(spec.algorithm, spec.flat_params, derive_seed(spec.seed, "flat"))
    ).fit(X_train, y_train)
    preds = model.predict(X_test)
    metrics = evaluate_predictions(y_test, preds, list(FLAT_CLASSES))
    metrics.training_time = model.training_time_
    return metrics, model


@dataclass
class ComparisonRow:
    algorithm: str
    hier_accuracy: float
    hier_macro_f1: float
    hier_time: float
    flat_accuracy: float
    flat_macro_f1: float
    flat_time: float

    def _ratio(self, hier: float, flat: float) -> float | None:
        if flat == 0.0:
            return None  # undefined, never infinity
        return 100.0 * hier / flat

    @property
    def accuracy_pct(self) -> float | None:
        return self._ratio(self.hier_accuracy, self.flat_accuracy)

    @property
    def f1_pct(self) -> float | None:
        return self._ratio(self.hier_macro_f1, self.flat_macro_f1)

    @property
    def time_efficiency_pct(self) -> float | None:
        # >100 means the hierarchy trains faster than the one-shot model
        if self.hier_time == 0.0:
            return None
        return 100.0 * self.flat_time / self.hier_time


@dataclass
class ComparisonReport:
    rows: list[ComparisonRow]

    @staticmethod
    def _fmt(value: float | None) -> float | None:
        return None if value is None else round(value, 1)

    def to_dicts(self) -> list[dict]:
        out = []
        for row in self.rows:
            out.append(
                {
                    "algorithm": row.algorithm,
                    "hier_accuracy": row.hier_accuracy,
                    "flat_accuracy": row.flat_accuracy,
                    "accuracy_pct": self._fmt(row.accuracy_pct),
                    "hier_macro_f1": row.hier_macro_f1,
                    "flat_macro_f1": row.flat_macro_f1,
                    "f1_pct": self._fmt(row.f1_pct),
                    "hier_time": row.hier_time,
                    "flat_time": row.flat_time,
                    "time_efficiency_pct": self._fmt(row.time_efficiency_pct),
                }
            )
        return out


def compare(hier_results: dict, flat_results: dict) -> ComparisonReport:
    """Build the hierarchical-vs-flat report; both dicts map algorithm to
    objects with accuracy/macro_f1/training_time attributes."""
    if set(hier_results) != set(flat_results):
        raise ValueError(
            f"algorithm sets differ: {sorted(hier_results)} vs {sorted(flat_results)}"
        )
    rows = []
    for algo in sorted(hier_results):
        h, f = hier_results[algo], flat_results[algo]
        rows.append(
            ComparisonRow(
                algorithm=algo,
                hier_accuracy=h.accuracy,
                hier_macro_f1=h.macro_f1,
                hier_time=h.training_time,
                flat_accuracy=f.accuracy,
                flat_macro_f1=f.macro_f1,
                flat_time=f.training_time,
            )
        )
    return ComparisonReport(rows=rows)

"""End-to-end reproducible experiments: simulate, featurize, train,
compare, diagnose, plan.

Every stage is a plain function over files, so the CLI subcommands compose
to exactly what run_experiment produces: run_experiment simply calls the
stages in order on the same paths.  All randomness is derived from the one
experiment seed with documented labels (simulate, split, per-model seeds),
which is what lets any stage be re-run in isolation.

With timing="none" every wall-clock field (training times, identification
latency, time-efficiency ratios) is written as zero so two runs of the
same config produce byte-identical outputs; timing="wall" (the default)
records real times in the same fields.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import hierarchy
from .bgp.mrt import serialize_mrt
from .bgp.textlog import format_update_lines, iter_update_lines
from .features.dataset import FeatureDataset, format_value, read_dataset, write_dataset
from .features.extract import extract_stream
from .features.labels import label_windows, read_ground_truth, write_ground_truth
from .features.windows import iter_windows
from .learn.base import derive_seed
from .learn.metrics import evaluate_predictions
from .learn.preprocessing import stratified_split_indices
from .learn.registry import ALGORITHMS, load_model, save_model
from .mitigation import plan as make_plan
from .simnet.generate import generate_stream
from .simnet.scenario import Scenario, load_scenario, scenario_from_dict
from .simnet.topology import Topology, default_topology, load_topology, _load_structured

DEFAULT_ALGORITHMS = ["gaussian_nb", "logistic", "cart", "random_forest", "knn", "gradient_boost"]


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class ExperimentConfig:
    out_dir: str
    topology: str | None = None  # None: packaged default
    scenario: str | None = None
    window_seconds: int = 60
    t0: int = 0
    train_fraction: float = 0.6
    algorithms: list = field(default_factory=lambda: list(DEFAULT_ALGORITHMS))
    algorithm_params: dict = field(default_factory=dict)  # name -> {step1/step2/flat: {...}}
    diagnose_with: str = "random_forest"
    seed: int = 0
    timing: str = "wall"
    stream_formats: list = field(default_factory=lambda: ["text"])

    def __post_init__(self):
        if self.window_seconds <= 0:
            raise ConfigError("window_seconds must be positive")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must be in (0, 1)")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ConfigError(
                f"unsupported algorithms: {unknown}; supported: {sorted(ALGORITHMS)}"
            )
        if self.diagnose_with not in self.algorithms:
            raise ConfigError(
                f"diagnose_with={self.diagnose_with!r} is not among algorithms {self.algorithms}"
            )
        if self.timing not in ("wall", "none"):
            raise ConfigError("timing must be 'wall' or 'none'")
        bad = set(self.stream_formats) - {"text", "mrt"}
        if bad:
            raise ConfigError(f"unknown stream formats: {sorted(bad)}")
        for name in self.topology, self.scenario:
            if name is not None and not Path(name).exists():
                raise ConfigError(f"referenced path does not exist: {name}")
        # build the per-algorithm specs now so bad hyperparameters fail fast
        for algo in self.algorithms:
            self.pipeline_spec(algo)

    def pipeline_spec(self, algo: str) -> hierarchy.PipelineSpec:
        params = self.algorithm_params.get(algo, {})
        return hierarchy.PipelineSpec(
            algorithm=algo,
            step1_params=dict(params.get("step1", {})),
            step2_params=dict(params.get("step2", {})),
            flat_params=dict(params["flat"]) if "flat" in params else None,
            seed=derive_seed(self.seed, "model", algo),
        )

    def to_dict(self) -> dict:
        return {
            "out_dir": self.out_dir,
            "topology": self.topology,
            "scenario": self.scenario,
            "window_seconds": self.window_seconds,
            "t0": self.t0,
            "train_fraction": self.train_fraction,
            "algorithms": list(self.algorithms),
            "algorithm_params": self.algorithm_params,
            "diagnose_with": self.diagnose_with,
            "seed": self.seed,
            "timing": self.timing,
            "stream_formats": list(self.stream_formats),
        }


def load_config(path, **overrides) -> ExperimentConfig:
    doc = _load_structured(path)
    doc.update({k: v for k, v in overrides.items() if v is not None})
    doc.setdefault("out_dir", "out")
    return ExperimentConfig(**doc)


def load_topology_or_default(path: str | None) -> Topology:
    return default_topology() if path is None else load_topology(path)


def load_scenario_or_default(path: str | None) -> Scenario:
    if path is None:
        text = resources.files("sicnmaint.data").joinpath("default_scenario.json").read_text()
        return scenario_from_dict(json.loads(text))
    return load_scenario(path)


# ---------------------------------------------------------------- stages

def stage_simulate(config: ExperimentConfig) -> dict:
    """Generate the update stream and ground truth into the output directory."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    topology = load_topology_or_default(config.topology)
    scenario = load_scenario_or_default(config.scenario)
    records, truth = generate_stream(topology, scenario, seed=derive_seed(config.seed, "simulate"))

    text_path = out / "stream.txt"
    mrt_path = out / "stream.mrt"
    sinks = []
    if "text" in config.stream_formats:
        sinks.append(("text", open(text_path, "w", encoding="utf-8")))
    if "mrt" in config.stream_formats:
        sinks.append(("mrt", open(mrt_path, "wb")))
    n = 0
    try:
        for rec in records:
            n += 1
            for kind, fh in sinks:
                if kind == "text":
                    for line in format_update_lines(rec):
                        fh.write(line + "\n")
                else:
                    fh.write(serialize_mrt(rec))
    finally:
        for _kind, fh in sinks:
            fh.close()
    write_ground_truth(truth, out / "ground_truth.csv")
    return {"records": n, "events": len(truth)}


def stage_featurize(config: ExperimentConfig) -> dict:
    """Window the stream, extract features, and label from ground truth."""
    out = Path(config.out_dir)
    truth = read_ground_truth(out / "ground_truth.csv")
    with open(out / "stream.txt", "r", encoding="utf-8") as fh:
        records = iter_update_lines(fh)
        fvs = list(extract_stream(iter_windows(records, config.window_seconds, config.t0)))
    fvs = label_windows(fvs, config.window_seconds, truth)
    dataset = FeatureDataset.from_vectors(fvs)
    write_dataset(dataset, out / "windows.csv")

    mask1 = np.isin(dataset.y, hierarchy.STEP1_CLASSES)
    ni = dataset.subset(mask1)
    mask2 = np.isin(dataset.y, (0, 4, 5))
    na = dataset.subset(mask2)
    na.y = hierarchy.fault_view(dataset.X, dataset.y)[1]
    write_dataset(ni, out / "ni.csv")
    write_dataset(na, out / "na.csv")
    return {"windows": len(dataset), "ni_rows": len(ni), "na_rows": len(na)}


def _split_windows(config: ExperimentConfig, dataset: FeatureDataset):
    tr, te = stratified_split_indices(
        dataset.y, config.train_fraction, derive_seed(config.seed, "split")
    )
    return tr, te


def _views(dataset: FeatureDataset, idx: np.ndarray):
    X, y = dataset.X[idx], dataset.y[idx]
    return hierarchy.intrusion_view(X, y), hierarchy.fault_view(X, y), (X, y)


def _wall(config: ExperimentConfig, value: float) -> float:
    return float(value) if config.timing == "wall" else 0.0


def stage_train(config: ExperimentConfig) -> dict:
    """Train hierarchical pipelines for every algorithm; write models and
    per-step metrics."""
    out = Path(config.out_dir)
    dataset = read_dataset(out / "windows.csv")
    tr, te = _split_windows(config, dataset)
    (ni_tr, na_tr, _flat_tr) = _views(dataset, tr)
    (ni_te, na_te, flat_te) = _views(dataset, te)

    models_dir = out / "models"
    models_dir.mkdir(exist_ok=True)
    include_timing = config.timing == "wall"

    metrics_rows = []
    hier_eval = {}
    for algo in config.algorithms:
        spec = config.pipeline_spec(algo)
        pipeline = hierarchy.train_pipeline(ni_tr, na_tr, spec)
        save_model(pipeline.step1, models_dir / f"{algo}.step1.json", include_timing)
        save_model(pipeline.step2, models_dir / f"{algo}.step2.json", include_timing)

        m1 = evaluate_predictions(
            ni_te[1], pipeline.step1.predict(ni_te[0]), list(hierarchy.STEP1_CLASSES)
        )
        m2 = evaluate_predictions(
            na_te[1], pipeline.step2.predict(na_te[0]), list(hierarchy.STEP2_CLASSES)
        )
        e2e = hierarchy.evaluate_pipeline(pipeline, flat_te[0], flat_te[1])
        metrics_rows.append(
            {
                "algorithm": algo,
                "step1_accuracy": m1.accuracy,
                "step1_macro_f1": m1.macro_f1,
                "step2_accuracy": m2.accuracy,
                "step2_macro_f1": m2.macro_f1,
            }
        )
        hier_eval[algo] = {
            "accuracy": e2e.accuracy,
            "macro_f1": e2e.macro_f1,
            "training_time": _wall(config, pipeline.training_time),
        }

    with open(out / "metrics.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["algorithm", "step1_accuracy", "step1_macro_f1", "step2_accuracy", "step2_macro_f1"]
        )
        for row in metrics_rows:
            writer.writerow(
                [row["algorithm"]]
                + [format_value(row[k]) for k in
                   ("step1_accuracy", "step1_macro_f1", "step2_accuracy", "step2_macro_f1")]
            )
    _write_json(out / "metrics.json", metrics_rows)
    _write_json(out / "hier_eval.json", hier_eval)
    return {"algorithms": list(config.algorithms)}


def stage_compare(config: ExperimentConfig) -> dict:
    """Train flat baselines and emit the hierarchical-vs-flat report."""
    out = Path(config.out_dir)
    dataset = read_dataset(out / "windows.csv")
    tr, te = _split_windows(config, dataset)
    (ni_tr, na_tr, _flat_tr) = _views(dataset, tr)
    (_ni_te, _na_te, flat_te) = _views(dataset, te)
    hier_eval = _read_json(out / "hier_eval.json")
    models_dir = out / "models"
    models_dir.mkdir(exist_ok=True)
    include_timing = config.timing == "wall"

    @dataclass
    class _Result:
        accuracy: float
        macro_f1: float
        training_time: float

    hier_results = {}
    flat_results = {}
    for algo in config.algorithms:
        spec = config.pipeline_spec(algo)
        metrics, model = hierarchy.run_flat(spec, ni_tr, na_tr, test=flat_te)
        save_model(model, models_dir / f"{algo}.flat.json", include_timing)
        flat_results[algo] = _Result(
            metrics.accuracy, metrics.macro_f1, _wall(config, metrics.training_time)
        )
        h = hier_eval[algo]
        hier_results[algo] = _Result(h["accuracy"], h["macro_f1"], h["training_time"])

    report = hierarchy.compare(hier_results, flat_results)
    rows = report.to_dicts()
    _write_json(out / "comparison.json", rows)
    with open(out / "comparison.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["algorithm", "hier_acc", "flat_acc", "acc_pct", "hier_f1", "flat_f1", "f1_pct", "time_pct"]
        )
        for row in rows:
            writer.writerow(
                [
                    row["algorithm"],
                    format_value(row["hier_accuracy"]),
                    format_value(row["flat_accuracy"]),
                    _pct(row["accuracy_pct"]),
                    format_value(row["hier_macro_f1"]),
                    format_value(row["flat_macro_f1"]),
                    _pct(row["f1_pct"]),
                    _pct(row["time_efficiency_pct"]),
                ]
            )
    return {"rows": len(rows)}


def stage_pipeline(config: ExperimentConfig) -> dict:
    """Diagnose every window with the configured algorithm's pipeline."""
    out = Path(config.out_dir)
    dataset = read_dataset(out / "windows.csv")
    topology = load_topology_or_default(config.topology)
    algo = config.diagnose_with
    pipeline = hierarchy.PipelineModel(
        algorithm=algo,
        step1=load_model(out / "models" / f"{algo}.step1.json"),
        step2=load_model(out / "models" / f"{algo}.step2.json"),
    )
    diagnoses = hierarchy.diagnose_stream(pipeline, dataset.X, topology)
    with open(out / "diagnosis.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_start", "verdict", "class_label", "root_cause_link", "latency_seconds"])
        for t, diag in zip(dataset.t, diagnoses):
            writer.writerow(
                [
                    format_value(float(t)),
                    diag.verdict,
                    diag.class_label,
                    diag.root_cause.link if diag.root_cause else "",
                    format_value(_wall(config, diag.identification_latency)),
                ]
            )
    return {"windows": len(diagnoses)}


def stage_mitigate(config: ExperimentConfig) -> dict:
    """Plan mitigations for every non-normal diagnosis."""
    out = Path(config.out_dir)
    topology = load_topology_or_default(config.topology)
    entries = []
    with open(out / "diagnosis.csv", "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            verdict = row["verdict"]
            if verdict == "normal":
                continue
            cls = int(row["class_label"])
            if verdict == "fault":
                diag = hierarchy.Diagnosis(
                    "fault", cls, hierarchy.localize(cls, topology), 0.0
                )
            else:
                diag = hierarchy.Diagnosis("intrusion", cls, None, 0.0)
            entries.append(
                {
                    "window_start": float(row["window_start"]),
                    "verdict": verdict,
                    "class_label": cls,
                    "plan": make_plan(diag, topology).to_dict(),
                }
            )
    _write_json(out / "mitigation.json", entries)
    return {"plans": len(entries)}


_STAGES = (
    ("simulate", stage_simulate),
    ("featurize", stage_featurize),
    ("train", stage_train),
    ("compare", stage_compare),
    ("pipeline", stage_pipeline),
    ("mitigate", stage_mitigate),
)


def run_experiment(config: ExperimentConfig) -> dict:
    """Run every stage in order; raises StageError naming the failed stage.

    Partial outputs are left in place for debugging.
    """
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "resolved_config.json", config.to_dict())
    summary = {}
    for name, fn in _STAGES:
        try:
            summary[name] = fn(config)
        except Exception as exc:
            raise StageError(name, exc) from exc
    return summary


def _pct(value) -> str:
    return "undef" if value is None else f"{value:.1f}"


def _write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)

"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with `pytest -s tests/test_acceptance.py` to see them).

The synthetic end-to-end scenarios run the default topology with one worm
interval (class 3) and one fixed-trunk outage at desk scale; the learner
criteria check the from-scratch implementations against independent
brute-force oracles and finite differences.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import random_record
from oracles import (
    cart_oracle,
    central_difference,
    feature_oracle,
    knn_oracle,
    nb_oracle_log_joint,
)
from sicnmaint import experiment, hierarchy
from sicnmaint.bgp.mrt import parse_mrt, serialize_mrt
from sicnmaint.features.extract import SessionState, extract_features, extract_stream
from sicnmaint.features.labels import label_windows
from sicnmaint.features.windows import bin_stream, iter_windows
from sicnmaint.learn.boosting import softmax_grad_hess
from sicnmaint.learn.forest import RandomForestClassifier
from sicnmaint.learn.linear import softmax_loss_and_grad
from sicnmaint.learn.metrics import evaluate_predictions
from sicnmaint.learn.naive_bayes import GaussianNB
from sicnmaint.learn.neighbors import KNeighborsClassifier
from sicnmaint.learn.preprocessing import stratified_split_indices
from sicnmaint.learn.tree import DecisionTreeClassifier
from sicnmaint.mitigation import plan as make_plan
from sicnmaint.simnet.generate import generate_stream
from sicnmaint.simnet.scenario import Scenario, ScenarioEvent
from sicnmaint.simnet.topology import default_topology


RESULTS: list[str] = []  # emitted by the terminal-summary hook in conftest


def _criterion(name: str, ok: bool, detail: str = "") -> None:
    line = f"[ACCEPTANCE] {name}: {'PASS' if ok else 'FAIL'} {detail}".rstrip()
    RESULTS.append(line)
    print("\n" + line)
    assert ok, f"{name}: {detail}"


# ------------------------------------------------------------------ 1

def test_parser_round_trip():
    rng = np.random.default_rng(20240901)
    start = time.perf_counter()
    bad = 0
    for _ in range(1000):
        record = random_record(rng)
        parsed, stats = parse_mrt(serialize_mrt(record))
        if list(parsed) != [record] or stats.total != 1:
            bad += 1

    # unsupported-type stream accounting
    import struct

    records = [random_record(rng, ts_sec=i) for i in range(50)]
    blob = b""
    expected_skips = 0
    for i, record in enumerate(records):
        if i % 3 == 0:
            blob += struct.pack(">IHHI", i, 13, 2, 6) + b"\x00" * 6  # TABLE_DUMP_V2
            expected_skips += 1
        blob += serialize_mrt(record)
    parsed, stats = parse_mrt(blob)
    parsed = list(parsed)
    ok_stats = (
        parsed == records
        and stats.records_emitted == 50
        and stats.records_skipped == expected_skips
        and stats.total == 50 + expected_skips
    )
    elapsed = time.perf_counter() - start
    _criterion(
        "parser-round-trip",
        bad == 0 and ok_stats and elapsed < 5.0,
        f"(1000 records, {elapsed:.2f}s)",
    )


# ------------------------------------------------------------------ 2

_INT_FEATURES = list(range(0, 8)) + list(range(13, 36))
_STAT_FEATURES = [8, 9, 10, 11, 12, 36]


def _fixture_stream(rng, n):
    from sicnmaint.bgp.records import BgpUpdateRecord, Origin, PrefixAnnouncement

    prefixes = [f"10.{i}.0.0/16" for i in range(4)]
    peers = ["10.0.0.1", "10.0.0.2"]
    paths = [(65001,), (65001, 65002), (65001, 65002, 65003), (7, 8, 9, 10, 11)]
    records = []
    for ts in sorted(int(t) for t in rng.integers(0, 50 * 60, size=n)):
        peer = peers[int(rng.integers(0, 2))]
        if rng.random() < 0.35:
            records.append(
                BgpUpdateRecord(
                    ts_sec=ts,
                    ts_usec=int(rng.integers(0, 1_000_000)),
                    peer_address=peer,
                    peer_as=65001,
                    withdrawn=(prefixes[int(rng.integers(0, 4))],),
                )
            )
        else:
            ann = PrefixAnnouncement(
                prefixes[int(rng.integers(0, 4))],
                paths[int(rng.integers(0, 4))],
                Origin(int(rng.integers(0, 3))),
            )
            records.append(
                BgpUpdateRecord(
                    ts_sec=ts,
                    ts_usec=int(rng.integers(0, 1_000_000)),
                    peer_address=peer,
                    peer_as=65001,
                    announced=(ann,),
                )
            )
    return records


def test_feature_oracle():
    rng = np.random.default_rng(77)
    records = _fixture_stream(rng, 1200)
    windows = bin_stream(records, 60, 0)[:50]
    assert len(windows) == 50
    state = SessionState()
    oracle_state = {}
    worst = 0.0
    exact = True
    for w in windows:
        mine = extract_features(w, state).values
        ref = np.array(feature_oracle(w.records, oracle_state))
        if not np.array_equal(mine[_INT_FEATURES], ref[_INT_FEATURES]):
            exact = False
        worst = max(worst, float(np.max(np.abs(mine[_STAT_FEATURES] - ref[_STAT_FEATURES]))))

    # conservation on every generated stream
    conserved = True
    for seed in (1, 2, 3):
        stream = _fixture_stream(np.random.default_rng(seed), 600)
        vectors = list(extract_stream(bin_stream(stream, 60, 0)))
        total_ann = sum(len(r.announced) for r in stream)
        total_wd = sum(len(r.withdrawn) for r in stream)
        if sum(v.values[0] for v in vectors) != total_ann:
            conserved = False
        if sum(v.values[1] for v in vectors) != total_wd:
            conserved = False
    topo = default_topology()
    sc = Scenario(
        duration_seconds=1800,
        events=[ScenarioEvent(kind="link_outage", start=600, end=900, target_link="link-r1-r2")],
    )
    sim_records, _ = generate_stream(topo, sc, seed=3)
    sim_records = list(sim_records)
    vectors = list(extract_stream(bin_stream(sim_records, 60, 0)))
    if sum(v.values[0] for v in vectors) != sum(len(r.announced) for r in sim_records):
        conserved = False
    if sum(v.values[1] for v in vectors) != sum(len(r.withdrawn) for r in sim_records):
        conserved = False

    _criterion(
        "feature-oracle",
        exact and worst <= 1e-9 and conserved,
        f"(50 windows, max stat deviation {worst:.2e})",
    )


# ------------------------------------------------------------------ 3

def test_learner_oracles():
    rng = np.random.default_rng(4242)
    start = time.perf_counter()

    cart_ok = knn_ok = True
    for _ in range(200):
        n = int(rng.integers(2, 9))
        d = int(rng.integers(1, 3))
        X = rng.integers(0, 4, size=(n, d)).astype(float)
        y = rng.integers(0, 3, size=n)
        queries = np.vstack([X, rng.integers(-1, 5, size=(8, d)).astype(float)])
        depth = None if rng.random() < 0.5 else int(rng.integers(1, 4))
        tree = DecisionTreeClassifier(max_depth=depth).fit(X, y)
        oracle = cart_oracle(X.tolist(), y.tolist(), max_depth=depth)
        if list(tree.predict(queries)) != [oracle(q.tolist()) for q in queries]:
            cart_ok = False
        k = int(rng.integers(1, n + 1))
        knn = KNeighborsClassifier(k=k, standardize=False).fit(X, y)
        if list(knn.predict(queries)) != [
            knn_oracle(X.tolist(), y.tolist(), k, q.tolist()) for q in queries
        ]:
            knn_ok = False

    nb_ok = True
    for _ in range(50):
        n, d = int(rng.integers(4, 12)), int(rng.integers(1, 4))
        X = rng.normal(size=(n, d)) * 2
        y = rng.integers(0, 3, size=n)
        y[:3] = [0, 1, 2]
        model = GaussianNB().fit(X, y)
        q = rng.normal(size=d) * 2
        classes, ref = nb_oracle_log_joint(X.tolist(), y.tolist(), 1e-9, q.tolist())
        mine = model.predict_log_joint(q.reshape(1, -1))[0]
        if not np.allclose(mine, ref, rtol=1e-9, atol=0):
            nb_ok = False
        if model.predict(q.reshape(1, -1))[0] != classes[int(np.argmax(ref))]:
            nb_ok = False

    grad_ok = True
    for _ in range(10):
        n, d, k = int(rng.integers(4, 10)), int(rng.integers(1, 4)), int(rng.integers(2, 4))
        X = rng.normal(size=(n, d))
        Y = np.zeros((n, k))
        Y[np.arange(n), rng.integers(0, k, size=n)] = 1.0
        Xb = np.hstack([np.ones((n, 1)), X])
        for W0 in (np.zeros((d + 1, k)), rng.normal(size=(d + 1, k))):
            _loss, grad = softmax_loss_and_grad(W0, Xb, Y, l2=1e-3)
            numeric = central_difference(
                lambda W: softmax_loss_and_grad(W, Xb, Y, l2=1e-3)[0], W0
            )
            if np.linalg.norm(grad - numeric) / max(np.linalg.norm(grad), 1e-12) > 1e-4:
                grad_ok = False

        y_idx = rng.integers(0, k, size=n)
        scores = rng.normal(size=(n, k))
        g, _h = softmax_grad_hess(scores, y_idx)

        def total_nll(s, y_idx=y_idx, n=n):
            p = np.exp(s - s.max(axis=1, keepdims=True))
            p /= p.sum(axis=1, keepdims=True)
            return float(-np.sum(np.log(p[np.arange(n), y_idx])))

        numeric = central_difference(total_nll, scores)
        if np.linalg.norm(g - numeric) / max(np.linalg.norm(g), 1e-12) > 1e-4:
            grad_ok = False

    rf_ok = True
    for _ in range(10):
        n, d = int(rng.integers(4, 16)), int(rng.integers(1, 4))
        X = rng.integers(0, 5, size=(n, d)).astype(float)
        y = rng.integers(0, 3, size=n)
        forest = RandomForestClassifier(
            n_trees=1, bootstrap=False, features_per_split=d, seed=0
        ).fit(X, y)
        cart = DecisionTreeClassifier().fit(X, y)
        queries = rng.integers(-1, 6, size=(20, d)).astype(float)
        if not np.array_equal(forest.predict(queries), cart.predict(queries)):
            rf_ok = False

    elapsed = time.perf_counter() - start
    _criterion(
        "learner-oracles",
        cart_ok and knn_ok and nb_ok and grad_ok and rf_ok and elapsed < 60.0,
        f"(cart={cart_ok} knn={knn_ok} nb={nb_ok} grad={grad_ok} rf={rf_ok}, {elapsed:.1f}s)",
    )


# ------------------------------------------------------------------ 4

def test_metrics_criterion():
    m = evaluate_predictions(["A", "A", "B", "B"], ["A", "B", "B", "B"], ["A", "B"])
    hand_ok = m.accuracy == 0.75 and abs(m.macro_f1 - (2 / 3 + 4 / 5) / 2) <= 1e-9

    rng = np.random.default_rng(5)
    perm_ok = True
    for _ in range(50):
        k = int(rng.integers(2, 7))
        n = int(rng.integers(5, 80))
        y_true = rng.integers(0, k, size=n)
        y_pred = rng.integers(0, k, size=n)
        base = evaluate_predictions(y_true, y_pred, list(range(k)))
        perm = rng.permutation(k)
        shuffled = evaluate_predictions(perm[y_true], perm[y_pred], list(range(k)))
        if abs(base.macro_f1 - shuffled.macro_f1) > 1e-12 or base.accuracy != shuffled.accuracy:
            perm_ok = False
    _criterion(
        "metrics",
        hand_ok and perm_ok,
        f"(accuracy={m.accuracy}, macro_f1={m.macro_f1:.10f})",
    )


# ------------------------------------------------------------------ 5

E2E_SEED = 1337
E2E_SCENARIO = Scenario(
    duration_seconds=600_000,  # ~10,000 windows at 60 s
    events=[
        ScenarioEvent(
            kind="worm",
            worm_class=3,
            target_peers=("R2", "R7", "R9"),
            start=120_000,
            end=138_000,
            multiplier=12.0,
        ),
        ScenarioEvent(
            kind="link_outage", target_link="link-r1-r2", start=300_000, end=306_000
        ),
    ],
)


def test_end_to_end_scenario():
    start = time.perf_counter()
    topo = default_topology()
    records, truth = generate_stream(topo, E2E_SCENARIO, seed=E2E_SEED)
    vectors = list(extract_stream(iter_windows(records, 60, 0)))
    vectors = label_windows(vectors, 60, truth)
    X = np.vstack([fv.values for fv in vectors])
    y = np.array([fv.label for fv in vectors])
    n_windows = len(vectors)

    tr, te = stratified_split_indices(y, 0.6, seed=hierarchy.derive_seed(E2E_SEED, "split"))
    ni_tr = hierarchy.intrusion_view(X[tr], y[tr])
    na_tr = hierarchy.fault_view(X[tr], y[tr])
    ni_te = hierarchy.intrusion_view(X[te], y[te])
    na_te = hierarchy.fault_view(X[te], y[te])

    spec = hierarchy.PipelineSpec(algorithm="random_forest", seed=E2E_SEED)
    pipeline = hierarchy.train_pipeline(ni_tr, na_tr, spec)
    assert len(pipeline.step1.trees_) == 200 and len(pipeline.step2.trees_) == 60

    m1 = evaluate_predictions(
        ni_te[1], pipeline.step1.predict(ni_te[0]), list(hierarchy.STEP1_CLASSES)
    )
    m2 = evaluate_predictions(
        na_te[1], pipeline.step2.predict(na_te[0]), list(hierarchy.STEP2_CLASSES)
    )

    diagnoses = hierarchy.diagnose_stream(pipeline, X, topo)
    outage_idx = np.flatnonzero(y == 4)
    fault1 = [
        d
        for d in (diagnoses[i] for i in outage_idx)
        if d.verdict == "fault" and d.class_label == 1
    ]
    cause_ok = all(set(d.root_cause.routers) == {"R1", "R2"} for d in fault1)
    fault_rate = len(fault1) / len(outage_idx)

    plans = [make_plan(d, topo) for d in diagnoses if d.verdict != "normal"]
    kinds = set()
    switch_ok = repair_ok = False
    for p in plans:
        for action in p.actions:
            kinds.add(action.action)
            if action.action == "backhaul_switch" and action.target[0] == "N7":
                switch_ok = True
            if action.action == "repair_dispatch" and set(action.target) == {
                "R1:eth1",
                "R2:eth0",
            }:
                repair_ok = True

    elapsed = time.perf_counter() - start
    ok = (
        abs(n_windows - 10_000) <= 2
        and m1.accuracy >= 0.95
        and m2.accuracy >= 0.95
        and fault_rate >= 0.95
        and cause_ok
        and switch_ok
        and repair_ok
        and elapsed < 120.0
    )
    _criterion(
        "end-to-end-scenario",
        ok,
        f"(windows={n_windows} step1_acc={m1.accuracy:.4f} step2_acc={m2.accuracy:.4f} "
        f"outage_fault1_rate={fault_rate:.3f} actions={sorted(kinds)} {elapsed:.0f}s)",
    )


# ------------------------------------------------------------------ 6

def test_hier_vs_flat_direction():
    # the end-to-end scenario shape at reduced duration, swept over 5 seeds
    topo = default_topology()
    scenario = Scenario(
        duration_seconds=120_000,  # 2,000 windows
        events=[
            ScenarioEvent(
                kind="worm",
                worm_class=3,
                target_peers=("R2", "R7", "R9"),
                start=24_000,
                end=31_200,
                multiplier=12.0,
            ),
            ScenarioEvent(
                kind="link_outage", target_link="link-r1-r2", start=60_000, end=66_000
            ),
        ],
    )
    algonames = ("random_forest", "gradient_boost")
    acc = {a: {"hier": [], "flat": []} for a in algonames}
    f1 = {a: {"hier": [], "flat": []} for a in algonames}
    times = {a: {"hier": [], "flat": []} for a in algonames}

    for seed in range(5):
        records, truth = generate_stream(topo, scenario, seed=seed)
        vectors = label_windows(list(extract_stream(iter_windows(records, 60, 0))), 60, truth)
        X = np.vstack([fv.values for fv in vectors])
        y = np.array([fv.label for fv in vectors])
        tr, te = stratified_split_indices(y, 0.6, seed=hierarchy.derive_seed(seed, "split"))
        ni_tr = hierarchy.intrusion_view(X[tr], y[tr])
        na_tr = hierarchy.fault_view(X[tr], y[tr])
        test = (X[te], y[te])
        for algo in algonames:
            spec = hierarchy.PipelineSpec(algorithm=algo, seed=seed)
            pipeline = hierarchy.train_pipeline(ni_tr, na_tr, spec)
            hier_metrics = hierarchy.evaluate_pipeline(pipeline, *test)
            flat_metrics, _ = hierarchy.run_flat(spec, ni_tr, na_tr, test=test)
            acc[algo]["hier"].append(hier_metrics.accuracy)
            acc[algo]["flat"].append(flat_metrics.accuracy)
            f1[algo]["hier"].append(hier_metrics.macro_f1)
            f1[algo]["flat"].append(flat_metrics.macro_f1)
            times[algo]["hier"].append(pipeline.training_time)
            times[algo]["flat"].append(flat_metrics.training_time)

    ok = True
    details = []
    for algo in algonames:
        mh, mf = np.mean(acc[algo]["hier"]), np.mean(acc[algo]["flat"])
        fh, ff = np.mean(f1[algo]["hier"]), np.mean(f1[algo]["flat"])
        if mh < mf - 0.02 or fh < ff - 0.02:
            ok = False
        details.append(f"{algo}: acc {mh:.4f}/{mf:.4f} f1 {fh:.4f}/{ff:.4f}")
    gb_eff = 100.0 * np.mean(times["gradient_boost"]["flat"]) / np.mean(
        times["gradient_boost"]["hier"]
    )
    if not gb_eff > 100.0:
        ok = False
    _criterion(
        "hier-vs-flat-direction",
        ok,
        f"({'; '.join(details)}; gb_time_efficiency={gb_eff:.1f}%)",
    )


# ------------------------------------------------------------------ 7

def test_run_experiment_determinism(tmp_path):
    scenario = {
        "duration_seconds": 18_000,
        "events": [
            {
                "kind": "worm",
                "class": 3,
                "target_peers": ["R2", "R7", "R9"],
                "start": 3_600,
                "end": 6_000,
                "multiplier": 8.0,
            },
            {"kind": "link_outage", "target_link": "link-r1-r2", "start": 10_800, "end": 13_200},
        ],
    }
    scenario_path = tmp_path / "scenario.json"
    scenario_path.write_text(json.dumps(scenario))

    def run(out_dir):
        config = experiment.ExperimentConfig(
            out_dir=str(out_dir),
            scenario=str(scenario_path),
            algorithms=["gaussian_nb", "random_forest"],
            algorithm_params={
                "random_forest": {"step1": {"n_trees": 40}, "step2": {"n_trees": 15}}
            },
            diagnose_with="random_forest",
            seed=99,
            timing="none",
        )
        experiment.run_experiment(config)
        files = {}
        for path in sorted(Path(out_dir).rglob("*")):
            if path.is_file() and path.name != "resolved_config.json":
                files[str(path.relative_to(out_dir))] = path.read_bytes()
        return files

    a = run(tmp_path / "run1")
    b = run(tmp_path / "run2")
    mismatched = sorted(set(a) ^ set(b)) + [k for k in a if k in b and a[k] != b[k]]
    _criterion(
        "run-experiment-determinism",
        mismatched == [],
        f"({len(a)} files compared{'; mismatched: ' + ', '.join(mismatched) if mismatched else ''})",
    )

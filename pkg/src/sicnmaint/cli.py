"""Command-line entry points.

    sicnmaint run       --config exp.toml [--seed N] [--window-seconds W] [--out DIR]
    sicnmaint simulate  --out DIR [--topology T] [--scenario S] [--seed N] [--format text mrt]
    sicnmaint featurize --out DIR [--window-seconds W] [--t0 T]
    sicnmaint train     --out DIR [--algorithms a b c] [--seed N]
    sicnmaint compare   --out DIR [...]
    sicnmaint pipeline  --out DIR [--diagnose-with ALGO]
    sicnmaint mitigate  --out DIR
    sicnmaint evaluate  --model M.json --dataset D.csv [--view step1|step2|flat]

Subcommands share one output directory and compose to the same files
`run` produces, because they call the same stage functions with seeds
derived from the experiment seed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import experiment, hierarchy
from .features.dataset import read_dataset
from .learn.metrics import evaluate
from .learn.registry import ALGORITHMS, load_model


def _config_from_args(args) -> experiment.ExperimentConfig:
    overrides = {
        "seed": args.seed,
        "window_seconds": args.window_seconds,
        "out_dir": args.out,
        "topology": getattr(args, "topology", None),
        "scenario": getattr(args, "scenario", None),
        "algorithms": getattr(args, "algorithms", None),
        "diagnose_with": getattr(args, "diagnose_with", None),
        "timing": getattr(args, "timing", None),
        "stream_formats": getattr(args, "formats", None),
    }
    if args.config:
        return experiment.load_config(args.config, **overrides)
    doc = {k: v for k, v in overrides.items() if v is not None}
    doc.setdefault("out_dir", "out")
    return experiment.ExperimentConfig(**doc)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="experiment config file (TOML or JSON)")
    parser.add_argument("--seed", type=int, default=None, help="experiment seed")
    parser.add_argument("--window-seconds", type=int, default=None, dest="window_seconds")
    parser.add_argument("--out", default=None, help="output directory")


def _run_stage(args, stages) -> int:
    config = _config_from_args(args)
    for name, fn in stages:
        info = fn(config)
        print(f"{name}: {json.dumps(info, sort_keys=True)}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sicnmaint", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the full experiment")
    _add_common(p_run)
    p_run.add_argument("--timing", choices=["wall", "none"], default=None)

    p_sim = sub.add_parser("simulate", help="generate the update stream and ground truth")
    _add_common(p_sim)
    p_sim.add_argument("--topology", default=None)
    p_sim.add_argument("--scenario", default=None)
    p_sim.add_argument("--format", nargs="+", choices=["text", "mrt"], dest="formats", default=None)

    p_feat = sub.add_parser("featurize", help="window the stream and extract features")
    _add_common(p_feat)

    p_train = sub.add_parser("train", help="train hierarchical models")
    _add_common(p_train)
    p_train.add_argument("--algorithms", nargs="+", choices=sorted(ALGORITHMS), default=None)
    p_train.add_argument("--timing", choices=["wall", "none"], default=None)

    p_cmp = sub.add_parser("compare", help="train flat baselines and compare")
    _add_common(p_cmp)
    p_cmp.add_argument("--algorithms", nargs="+", choices=sorted(ALGORITHMS), default=None)
    p_cmp.add_argument("--timing", choices=["wall", "none"], default=None)

    p_pipe = sub.add_parser("pipeline", help="diagnose every window")
    _add_common(p_pipe)
    p_pipe.add_argument("--diagnose-with", dest="diagnose_with", choices=sorted(ALGORITHMS), default=None)
    p_pipe.add_argument("--timing", choices=["wall", "none"], default=None)

    p_mit = sub.add_parser("mitigate", help="plan mitigations for detections")
    _add_common(p_mit)

    p_eval = sub.add_parser("evaluate", help="evaluate a saved model on a dataset CSV")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--dataset", required=True)
    p_eval.add_argument(
        "--view",
        choices=["step1", "step2", "flat", "as-is"],
        default="as-is",
        help="project combined labels into a step view before scoring",
    )
    p_eval.add_argument("--out", default=None, help="write metrics JSON here (default stdout)")

    args = parser.parse_args(argv)

    if args.command == "evaluate":
        return _cmd_evaluate(args)

    stage_map = dict(experiment._STAGES)
    try:
        if args.command == "run":
            config = _config_from_args(args)
            summary = experiment.run_experiment(config)
            print(json.dumps(summary, sort_keys=True))
            return 0
        return _run_stage(args, [(args.command, stage_map[args.command])])
    except experiment.StageError as exc:
        print(f"error in stage {exc.stage!r}: {exc.cause}", file=sys.stderr)
        return 1
    except (experiment.ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _cmd_evaluate(args) -> int:
    model = load_model(args.model)
    dataset = read_dataset(args.dataset)
    if dataset.y is None:
        print("error: dataset has no labels", file=sys.stderr)
        return 1
    X, y = dataset.X, dataset.y
    class_set = None
    if args.view == "step1":
        X, y = hierarchy.intrusion_view(X, y)
        class_set = list(hierarchy.STEP1_CLASSES)
    elif args.view == "step2":
        X, y = hierarchy.fault_view(X, y)
        class_set = list(hierarchy.STEP2_CLASSES)
    elif args.view == "flat":
        class_set = list(hierarchy.FLAT_CLASSES)
    metrics = evaluate(model, X, y, class_set=class_set)
    doc = json.dumps(metrics.to_dict(), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(doc + "\n")
    else:
        print(doc)
    return 0


if __name__ == "__main__":
    sys.exit(main())

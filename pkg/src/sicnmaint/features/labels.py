"""Window labeling from ground-truth incident intervals.

The combined label space covers both tiers of the identification task:

    0 normal        1 code-red-i    2 nimda    3 slammer
    4 outage-r1r2   5 outage-r5r6

A window gets the class of the interval containing its midpoint; when a
worm interval and an outage interval overlap, the intrusion tier wins.
Step-specific label views are derived from this combined encoding by the
pipeline layer.

Ground truth files are CSV with header `class,start,end`, one interval per
row, times in epoch seconds.
"""

from __future__ import annotations

import csv
from typing import Iterable, Sequence

from .extract import FeatureVector

CLASS_NAMES = ("normal", "code-red-i", "nimda", "slammer", "outage-r1r2", "outage-r5r6")
CLASS_IDS = {name: i for i, name in enumerate(CLASS_NAMES)}
INTRUSION_CLASSES = (1, 2, 3)
OUTAGE_CLASSES = (4, 5)


class GroundTruthError(ValueError):
    pass


def _to_class_id(cls) -> int:
    if isinstance(cls, str):
        if cls not in CLASS_IDS:
            raise GroundTruthError(f"unknown class identifier {cls!r}")
        return CLASS_IDS[cls]
    cls = int(cls)
    if not 0 <= cls < len(CLASS_NAMES):
        raise GroundTruthError(f"unknown class identifier {cls!r}")
    return cls


def _check_tier_overlap(
    intervals: list[tuple[int, float, float]], tier: Sequence[int], name: str
) -> None:
    spans = sorted((s, e) for c, s, e in intervals if c in tier)
    for (s1, e1), (s2, _e2) in zip(spans, spans[1:]):
        if s2 < e1:
            raise GroundTruthError(f"overlapping {name} intervals at {s2}")


def _validated(ground_truth: Iterable[tuple]) -> list[tuple[int, float, float]]:
    intervals = [(_to_class_id(c), float(s), float(e)) for c, s, e in ground_truth]
    for cls, start, end in intervals:
        if not start < end:
            raise GroundTruthError(f"empty interval for class {CLASS_NAMES[cls]}")
    _check_tier_overlap(intervals, INTRUSION_CLASSES, "intrusion")
    _check_tier_overlap(intervals, OUTAGE_CLASSES, "outage")
    return intervals


def label_windows(
    features: Sequence[FeatureVector],
    window_seconds: int,
    ground_truth: Iterable[tuple],
) -> list[FeatureVector]:
    """Label vectors by window midpoint against ground-truth intervals.

    ground_truth rows are (class, start, end) with class a name from
    CLASS_NAMES or its integer id; start/end in epoch seconds, half-open.
    Windows covered by no interval get the normal label 0.
    """
    intervals = _validated(ground_truth)
    worm = [(s, e, c) for c, s, e in intervals if c in INTRUSION_CLASSES]
    outage = [(s, e, c) for c, s, e in intervals if c in OUTAGE_CLASSES]

    out = []
    for fv in features:
        mid = fv.window_start + window_seconds / 2.0
        label = 0
        for s, e, c in worm:
            if s <= mid < e:
                label = c
                break
        if label == 0:
            for s, e, c in outage:
                if s <= mid < e:
                    label = c
                    break
        out.append(FeatureVector(window_start=fv.window_start, values=fv.values, label=label))
    return out


def read_ground_truth(path) -> list[tuple[str, float, float]]:
    rows: list[tuple[str, float, float]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["class", "start", "end"]:
            raise GroundTruthError(f"bad ground truth header: {header}")
        for row in reader:
            if len(row) != 3:
                raise GroundTruthError(f"bad ground truth row: {row}")
            _to_class_id(row[0])
            rows.append((row[0], float(row[1]), float(row[2])))
    return rows


def write_ground_truth(intervals: Iterable[tuple], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["class", "start", "end"])
        for cls, start, end in intervals:
            name = cls if isinstance(cls, str) else CLASS_NAMES[_to_class_id(cls)]
            writer.writerow([name, _format_time(start), _format_time(end)])


def _format_time(t: float) -> str:
    return str(int(t)) if float(t) == int(t) else repr(float(t))

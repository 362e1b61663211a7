"""Reduce each traffic window to the 37-feature vector used by the classifiers.

Feature catalog (f01..f37 in dataset files):

    F1  announcements                 F2  withdrawals
    F3  distinct announced prefixes   F4  distinct withdrawn prefixes
    F5  duplicate announcements (same peer/prefix re-announced with an
        identical AS path and origin while still reachable)
    F6  implicit withdrawals (re-announcement of a reachable prefix with a
        changed AS path or origin, no explicit withdrawal in between)
    F7  duplicate withdrawals (withdrawal of an already-unreachable prefix)
    F8  new-route announcements (first announcement for a peer/prefix, or
        the first after an explicit withdrawal)
    F9  average AS-path length        F10 maximum AS-path length
    F11 average count of unique ASes per path
    F12 average edit distance (Levenshtein over AS sequences) between
        consecutive paths for the same peer/prefix, over every
        re-announcement that has a predecessor path (identical paths
        contribute distance 0)
    F13 maximum such edit distance
    F14-F23 histogram of AS-path lengths 1..9, with >=10 folded into F23
    F24-F33 histogram of consecutive-path edit distances 1..9, with >=10
        folded into F33 (distance 0 is not binned)
    F34/F35/F36 announcements with origin IGP/EGP/INCOMPLETE
    F37 average inter-arrival time in seconds between consecutive records
        in the window (0 when fewer than 2 records)

Averages over empty sets are 0, never NaN, so vectors are always finite.
Counts are non-negative integers stored as floats.

Session state (last announced path/origin and a reachability flag per
peer/prefix) threads across windows in record order, which is what makes
duplicate/implicit/new-route classification and consecutive-path distances
well defined regardless of how the stream is chunked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .windows import Window

N_FEATURES = 37
FEATURE_NAMES = tuple(f"f{i:02d}" for i in range(1, N_FEATURES + 1))


def edit_distance(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    """Levenshtein distance between two AS sequences."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i]
        for j, y in enumerate(b, start=1):
            cost = 0 if x == y else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[-1]


@dataclass
class SessionState:
    """Per (peer, prefix) routing session memory.

    routes maps (peer_address, prefix) to [as_path, origin, reachable].
    A withdrawal clears the reachable flag but keeps the last path so a
    later re-announcement still has a predecessor for distance features.
    """

    routes: dict = field(default_factory=dict)


@dataclass
class FeatureVector:
    window_start: int
    values: np.ndarray
    label: int | None = None


def extract_features(window: Window, state: SessionState) -> FeatureVector:
    """Compute the 37 features for one window and advance the session state."""
    f = [0.0] * N_FEATURES
    routes = state.routes

    ann_prefixes = set()
    wd_prefixes = set()
    path_lengths: list[int] = []
    unique_counts: list[int] = []
    distances: list[int] = []
    origin_counts = [0, 0, 0]
    prev_ts = None
    gap_total = 0
    gap_count = 0

    for rec in window.records:
        ts = rec.timestamp_usec
        if prev_ts is not None:
            gap_total += ts - prev_ts
            gap_count += 1
        prev_ts = ts
        peer = rec.peer_address

        for pfx in rec.withdrawn:
            f[1] += 1  # F2
            wd_prefixes.add(pfx)
            entry = routes.get((peer, pfx))
            if entry is None or not entry[2]:
                f[6] += 1  # F7 duplicate withdrawal
            if entry is not None:
                entry[2] = False
            else:
                routes[(peer, pfx)] = [None, None, False]

        for ann in rec.announced:
            f[0] += 1  # F1
            pfx = ann.prefix
            path = ann.as_path
            ann_prefixes.add(pfx)
            plen = len(path)
            path_lengths.append(plen)
            unique_counts.append(len(set(path)))
            origin_counts[int(ann.origin)] += 1
            bin_idx = 13 + min(plen, 10) - 1  # F14..F23
            f[bin_idx] += 1

            key = (peer, pfx)
            entry = routes.get(key)
            if entry is None:
                f[7] += 1  # F8 new route (first ever)
                routes[key] = [path, ann.origin, True]
                continue
            last_path = entry[0]
            if last_path is not None:
                d = edit_distance(last_path, path)
                distances.append(d)
                if d >= 1:
                    f[23 + min(d, 10) - 1] += 1  # F24..F33
            if not entry[2]:
                f[7] += 1  # F8 new route (first after explicit withdrawal)
            elif last_path == path and entry[1] == ann.origin:
                f[4] += 1  # F5 duplicate announcement
            else:
                f[5] += 1  # F6 implicit withdrawal
            entry[0] = path
            entry[1] = ann.origin
            entry[2] = True

    f[2] = float(len(ann_prefixes))  # F3
    f[3] = float(len(wd_prefixes))  # F4
    if path_lengths:
        f[8] = sum(path_lengths) / len(path_lengths)  # F9
        f[9] = float(max(path_lengths))  # F10
        f[10] = sum(unique_counts) / len(unique_counts)  # F11
    if distances:
        f[11] = sum(distances) / len(distances)  # F12
        f[12] = float(max(distances))  # F13
    f[33] = float(origin_counts[0])  # F34
    f[34] = float(origin_counts[1])  # F35
    f[35] = float(origin_counts[2])  # F36
    if gap_count:
        f[36] = (gap_total / gap_count) / 1_000_000.0  # F37

    return FeatureVector(window_start=window.start, values=np.array(f, dtype=np.float64))


def extract_stream(
    windows: Iterable[Window], state: SessionState | None = None
) -> Iterator[FeatureVector]:
    """Extract features for a window sequence, threading one session state."""
    if state is None:
        state = SessionState()
    for window in windows:
        yield extract_features(window, state)

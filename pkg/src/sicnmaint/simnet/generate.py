"""Synthetic labeled BGP update stream generation.

The generator plays scripted anomaly events over a topology and emits the
update stream a route collector peered with `topology.peers` would log:

    baseline    Poisson announcement churn per peer over currently
                reachable prefixes (stable paths, so mostly duplicate
                announcements) plus sporadic withdraw/re-announce flaps.
    link_outage every (peer, prefix) whose path crosses the failed link is
                withdrawn within the propagation delay; pairs with an
                alternate path re-announce it shortly after (a path-change
                signal) and keep exploring path variants while the outage
                lasts; pairs with no alternate stay down and flap
                (duplicate withdrawals, short-lived re-announcements) the
                way routers hunting for dead routes do.  Everything broken
                is re-announced on its restored path within the
                propagation delay of the outage end.
    weather_fade an outage on a satellite-rf link whose onset is spread
                over a longer window.
    worm        announcement rate on the target peers multiplied, with
                randomized AS-path mutations and origin churn for the
                duration; labeled with the event's incident class.

Generation is two-phase: event times are drawn per peer/per event into
flat arrays (build), then a single chronological walk materializes records
against evolving per-pair reachability state.  Both phases draw from RNGs
derived from the one seed, so identical inputs give byte-identical
streams regardless of how the output is consumed.

Ground truth intervals mirror the events; outages map to the fault classes
of the localization step when they hit the R1-R2 or R5-R6 trunks, and
other outages or fades stay unlabeled (they are anomalies the label space
does not name).
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from ..bgp.records import BgpUpdateRecord, Origin, PrefixAnnouncement
from ..learn.base import derive_seed
from .scenario import Scenario
from .topology import Topology, path_links, shortest_path

# walk opcodes
_ANN = 0
_WORM_ANN = 1
_WORM_ANN_CHURN = 2
_WD_FLAP = 3
_RESTORE_FLAP = 4
_OUTAGE_WD = 5
_OUTAGE_ALT = 6
_OUTAGE_RESTORE = 7
_CHURN_DUPWD = 8
_CHURN_ANN = 9
_CHURN_WD = 10
_EXPLORE_ANN = 11

_WORM_AS_POOL = np.arange(65100, 65164)
_EXPLORE_AS_POOL = np.arange(64900, 64916)

_UP, _FLAP, _DOWN = 0, 1, 2


def outage_class_name(topology: Topology, link_name: str) -> str | None:
    """Ground-truth class for an outage target, if the label space names it."""
    routers = set(topology.links[link_name].routers())
    if routers == {"R1", "R2"}:
        return "outage-r1r2"
    if routers == {"R5", "R6"}:
        return "outage-r5r6"
    return None


def ground_truth_intervals(topology: Topology, scenario: Scenario) -> list[tuple[str, float, float]]:
    worm_names = {1: "code-red-i", 2: "nimda", 3: "slammer"}
    out = []
    for ev in scenario.events:
        if ev.kind == "worm":
            out.append((worm_names[ev.worm_class], ev.start, ev.end))
        elif ev.kind == "link_outage":
            name = outage_class_name(topology, ev.target_link)
            if name is not None:
                out.append((name, ev.start, ev.end))
    out.sort(key=lambda row: (row[1], row[2], row[0]))
    return out


class _EventBuffer:
    """Column-oriented event accumulator; build order breaks time ties."""

    def __init__(self):
        self.ts: list[np.ndarray] = []
        self.kind: list[np.ndarray] = []
        self.peer: list[np.ndarray] = []
        self.arg: list[np.ndarray] = []

    def add(self, ts: np.ndarray, kind: int, peer: int, arg: np.ndarray | int = 0):
        n = len(ts)
        if n == 0:
            return
        self.ts.append(ts.astype(np.int64))
        self.kind.append(np.full(n, kind, dtype=np.int8))
        self.peer.append(np.full(n, peer, dtype=np.int16))
        if isinstance(arg, np.ndarray):
            self.arg.append(arg.astype(np.int64))
        else:
            self.arg.append(np.full(n, arg, dtype=np.int64))

    def sorted_columns(self):
        if not self.ts:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty.astype(np.int8), empty.astype(np.int16), empty
        ts = np.concatenate(self.ts)
        kind = np.concatenate(self.kind)
        peer = np.concatenate(self.peer)
        arg = np.concatenate(self.arg)
        order = np.lexsort((np.arange(len(ts)), ts))
        return ts[order], kind[order], peer[order], arg[order]


def _as_path_for(topology: Topology, router_path: list[str]) -> tuple[int, ...]:
    path: list[int] = []
    for router in router_path:
        asn = topology.routers[router].asn
        if not path or path[-1] != asn:
            path.append(asn)
    return tuple(path)


def _segments_for_peer(peer: str, scenario: Scenario) -> list[tuple[float, float, float, float, int]]:
    """(start, end, rate_multiplier, churn, worm_class) pieces covering [0, duration)."""
    worm_spans = sorted(
        (ev.start, ev.end, ev.multiplier, ev.churn, ev.worm_class)
        for ev in scenario.events
        if ev.kind == "worm" and peer in ev.target_peers
    )
    for (s1, e1, *_), (s2, _e2, *_rest) in zip(worm_spans, worm_spans[1:]):
        if s2 < e1:
            raise ValueError(f"overlapping worm events target peer {peer}")
    segments = []
    cursor = 0.0
    for s, e, mult, churn, cls in worm_spans:
        if cursor < s:
            segments.append((cursor, s, 1.0, 0.0, 0))
        segments.append((s, e, mult, churn, cls))
        cursor = e
    if cursor < scenario.duration_seconds:
        segments.append((cursor, scenario.duration_seconds, 1.0, 0.0, 0))
    return segments


def _uniform_times(rng, start: float, end: float, n: int) -> np.ndarray:
    lo, hi = int(start * 1e6), int(end * 1e6)
    if hi <= lo or n == 0:
        return np.empty(0, dtype=np.int64)
    return rng.integers(lo, hi, size=n, dtype=np.int64)


def generate_stream(
    topology: Topology, scenario: Scenario, seed: int | None = None
) -> tuple[Iterator[BgpUpdateRecord], list[tuple[str, float, float]]]:
    """Generate (lazy record stream, ground-truth intervals) for a scenario."""
    scenario.validate_against(topology)
    if seed is None:
        seed = scenario.gen.seed
    gen = scenario.gen
    duration_usec = int(scenario.duration_seconds * 1e6)

    peers = list(topology.peers)
    peer_index = {p: i for i, p in enumerate(peers)}
    prefix_list = topology.all_prefixes()  # (network, prefix) sorted
    n_prefixes = len(prefix_list)

    # link-state epochs: boundaries at every outage/fade start and end
    failures = [ev for ev in scenario.events if ev.kind in ("link_outage", "weather_fade")]
    bounds = sorted({0.0} | {ev.start for ev in failures} | {ev.end for ev in failures})
    epochs: list[tuple[int, frozenset[str]]] = []
    for t in bounds:
        failed = frozenset(ev.target_link for ev in failures if ev.start <= t < ev.end)
        epochs.append((int(t * 1e6), failed))

    # per-epoch path tables: tables[e][peer_idx] = {pfx_idx: as_path or None}
    tables: list[list[dict[int, tuple[int, ...] | None]]] = []
    links_used: list[list[dict[int, frozenset[str]]]] = []
    for _t, failed in epochs:
        per_peer = []
        per_peer_links = []
        for p in peers:
            paths: dict[int, tuple[int, ...] | None] = {}
            lk: dict[int, frozenset[str]] = {}
            for j, (net, _pfx) in enumerate(prefix_list):
                rp = shortest_path(topology, p, net, failed)
                if rp is None:
                    paths[j] = None
                    lk[j] = frozenset()
                else:
                    paths[j] = _as_path_for(topology, rp)
                    lk[j] = frozenset(path_links(topology, rp))
            per_peer.append(paths)
            per_peer_links.append(lk)
        tables.append(per_peer)
        links_used.append(per_peer_links)

    def epoch_at(t_usec: int) -> int:
        idx = 0
        for k, (start, _f) in enumerate(epochs):
            if t_usec >= start:
                idx = k
        return idx

    def epoch_before(t: float) -> int:
        t_usec = int(t * 1e6)
        idx = 0
        for k, (start, _f) in enumerate(epochs):
            if start < t_usec:
                idx = k
        return idx

    build_rng = np.random.default_rng(derive_seed(seed, "simnet-build"))
    buf = _EventBuffer()

    # baseline announcements (worm segments multiply the rate and add churn)
    for pi, peer in enumerate(peers):
        for s, e, mult, churn, _cls in _segments_for_peer(peer, scenario):
            span = e - s
            n = int(build_rng.poisson(gen.lambda_a * span))
            times = _uniform_times(build_rng, s, e, n)
            if mult == 1.0:
                buf.add(times, _ANN, pi)
            else:
                extra = int(build_rng.poisson(gen.lambda_a * (mult - 1.0) * span))
                times = np.concatenate([times, _uniform_times(build_rng, s, e, extra)])
                churned = build_rng.random(len(times)) < churn
                buf.add(times[~churned], _WORM_ANN, pi)
                buf.add(times[churned], _WORM_ANN_CHURN, pi)

    # baseline withdraw/re-announce flaps
    flap_counter = 0
    for pi, peer in enumerate(peers):
        n = int(build_rng.poisson(gen.lambda_w * scenario.duration_seconds))
        times = _uniform_times(build_rng, 0.0, scenario.duration_seconds, n)
        gaps = (build_rng.uniform(1.0, 5.0, size=n) * 1e6).astype(np.int64)
        ids = np.arange(flap_counter, flap_counter + n, dtype=np.int64)
        flap_counter += n
        keep = times + gaps < duration_usec
        buf.add(times[keep], _WD_FLAP, pi, ids[keep])
        buf.add((times + gaps)[keep], _RESTORE_FLAP, pi, ids[keep])

    # outages and fades
    delay = gen.propagation_delay
    for ev in failures:
        link = ev.target_link
        pre = epoch_before(ev.start)
        during = epoch_at(int(ev.start * 1e6))
        onset = ev.onset_seconds if (ev.kind == "weather_fade" and ev.onset_seconds) else (
            4.0 * delay if ev.kind == "weather_fade" else delay
        )
        for pi in range(len(peers)):
            for j in range(n_prefixes):
                if link not in links_used[pre][pi][j]:
                    continue
                pair = pi * n_prefixes + j
                t_wd = int((ev.start + build_rng.uniform(0.0, onset)) * 1e6)
                buf.add(np.array([t_wd]), _OUTAGE_WD, pi, pair)
                has_alt = tables[during][pi][j] is not None
                if has_alt:
                    t_alt = t_wd + int(build_rng.uniform(0.5, 1.5) * delay * 1e6)
                    buf.add(np.array([min(t_alt, duration_usec - 1)]), _OUTAGE_ALT, pi, pair)
                    span = max(ev.end - delay - (ev.start + onset), 0.0)
                    n = int(build_rng.poisson(gen.explore_rate * span))
                    times = _uniform_times(build_rng, ev.start + onset, ev.end - delay, n)
                    buf.add(times, _EXPLORE_ANN, pi, pair)
                else:
                    span = max(ev.end - delay - (ev.start + onset), 0.0)
                    n = int(build_rng.poisson(gen.flap_rate * span))
                    times = _uniform_times(build_rng, ev.start + onset, ev.end - delay, n)
                    dup = build_rng.random(len(times)) < 0.5
                    buf.add(times[dup], _CHURN_DUPWD, pi, pair)
                    ann_times = times[~dup]
                    wd_gap = (build_rng.uniform(0.5, 2.0, size=len(ann_times)) * 1e6).astype(np.int64)
                    buf.add(ann_times, _CHURN_ANN, pi, pair)
                    buf.add(
                        np.minimum(ann_times + wd_gap, duration_usec - 1),
                        _CHURN_WD,
                        pi,
                        pair,
                    )
                t_res = int((ev.end + build_rng.uniform(0.0, delay)) * 1e6)
                buf.add(np.array([min(t_res, duration_usec - 1)]), _OUTAGE_RESTORE, pi, pair)

    ts, kind, peer_col, arg = buf.sorted_columns()
    truth = ground_truth_intervals(topology, scenario)

    def walk() -> Iterator[BgpUpdateRecord]:
        rng = np.random.default_rng(derive_seed(seed, "simnet-walk"))
        # per-pair state
        status = np.full(len(peers) * n_prefixes, _DOWN, dtype=np.int8)
        current: dict[int, tuple[int, ...]] = {}
        pools: list[list[int]] = []  # reachable prefix indices per peer
        pool_pos: list[dict[int, int]] = []
        for pi in range(len(peers)):
            pool: list[int] = []
            pos: dict[int, int] = {}
            for j in range(n_prefixes):
                path = tables[0][pi][j]
                if path is not None:
                    pair = pi * n_prefixes + j
                    status[pair] = _UP
                    current[pair] = path
                    pos[j] = len(pool)
                    pool.append(j)
            pools.append(pool)
            pool_pos.append(pos)

        def pool_remove(pi: int, j: int) -> None:
            pos = pool_pos[pi]
            if j not in pos:
                return
            pool = pools[pi]
            i = pos.pop(j)
            last = pool.pop()
            if last != j:
                pool[i] = last
                pos[last] = i

        def pool_add(pi: int, j: int) -> None:
            pos = pool_pos[pi]
            if j in pos:
                return
            pools[pi].append(j)
            pos[j] = len(pools[pi]) - 1

        flap_prefix: dict[int, int] = {}
        epoch_idx = 0
        next_epoch = epochs[1][0] if len(epochs) > 1 else None

        def mutate_path(path: tuple[int, ...], pool: np.ndarray, n_ops: int) -> tuple[int, ...]:
            mutated = list(path)
            for _ in range(n_ops):
                asn = int(pool[rng.integers(0, len(pool))])
                pos = int(rng.integers(1, len(mutated) + 1))
                mutated.insert(pos, asn)
            return tuple(mutated)

        def make_record(t: int, pi: int, ann=None, wd=None) -> BgpUpdateRecord:
            router = topology.routers[peers[pi]]
            return BgpUpdateRecord(
                ts_sec=int(t // 1_000_000),
                ts_usec=int(t % 1_000_000),
                peer_address=router.address,
                peer_as=router.asn,
                announced=ann or (),
                withdrawn=wd or (),
            )

        for i in range(len(ts)):
            t = int(ts[i])
            while next_epoch is not None and t >= next_epoch:
                epoch_idx += 1
                next_epoch = (
                    epochs[epoch_idx + 1][0] if epoch_idx + 1 < len(epochs) else None
                )
            op = int(kind[i])
            pi = int(peer_col[i])

            if op in (_ANN, _WORM_ANN, _WORM_ANN_CHURN):
                pool = pools[pi]
                if not pool:
                    continue
                j = pool[int(rng.integers(0, len(pool)))]
                pair = pi * n_prefixes + j
                path = current[pair]
                origin = Origin.IGP
                if op == _WORM_ANN_CHURN:
                    path = mutate_path(path, _WORM_AS_POOL, 1 + int(rng.integers(0, 3)))
                    if rng.random() < 0.4:
                        origin = Origin.INCOMPLETE
                yield make_record(
                    t,
                    pi,
                    ann=(
                        PrefixAnnouncement(
                            prefix=prefix_list[j][1], as_path=path, origin=origin
                        ),
                    ),
                )
                continue

            if op == _WD_FLAP:
                pool = pools[pi]
                if not pool:
                    continue
                j = pool[int(rng.integers(0, len(pool)))]
                pair = pi * n_prefixes + j
                flap_prefix[int(arg[i])] = j
                status[pair] = _FLAP
                pool_remove(pi, j)
                yield make_record(t, pi, wd=(prefix_list[j][1],))
                continue

            if op == _RESTORE_FLAP:
                j = flap_prefix.pop(int(arg[i]), None)
                if j is None:
                    continue
                pair = pi * n_prefixes + j
                if status[pair] != _FLAP:
                    continue  # an outage took the pair down meanwhile
                status[pair] = _UP
                pool_add(pi, j)
                yield make_record(
                    t,
                    pi,
                    ann=(
                        PrefixAnnouncement(
                            prefix=prefix_list[j][1], as_path=current[pair], origin=Origin.IGP
                        ),
                    ),
                )
                continue

            pair = int(arg[i])
            j = pair % n_prefixes

            if op == _OUTAGE_WD:
                status[pair] = _DOWN
                pool_remove(pi, j)
                yield make_record(t, pi, wd=(prefix_list[j][1],))
            elif op == _OUTAGE_ALT or op == _OUTAGE_RESTORE:
                path = tables[epoch_idx][pi][j]
                if path is None:
                    continue
                status[pair] = _UP
                current[pair] = path
                pool_add(pi, j)
                yield make_record(
                    t,
                    pi,
                    ann=(
                        PrefixAnnouncement(
                            prefix=prefix_list[j][1], as_path=path, origin=Origin.IGP
                        ),
                    ),
                )
            elif op == _CHURN_DUPWD:
                if status[pair] == _DOWN:
                    yield make_record(t, pi, wd=(prefix_list[j][1],))
            elif op == _CHURN_ANN:
                if status[pair] == _DOWN:
                    yield make_record(
                        t,
                        pi,
                        ann=(
                            PrefixAnnouncement(
                                prefix=prefix_list[j][1],
                                as_path=current[pair],
                                origin=Origin.IGP,
                            ),
                        ),
                    )
            elif op == _CHURN_WD:
                if status[pair] == _DOWN:
                    yield make_record(t, pi, wd=(prefix_list[j][1],))
            elif op == _EXPLORE_ANN:
                if status[pair] == _UP:
                    path = mutate_path(current[pair], _EXPLORE_AS_POOL, 1)
                    yield make_record(
                        t,
                        pi,
                        ann=(
                            PrefixAnnouncement(
                                prefix=prefix_list[j][1], as_path=path, origin=Origin.IGP
                            ),
                        ),
                    )

    return walk(), truth

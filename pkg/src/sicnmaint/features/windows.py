"""Fixed-duration time binning of BGP update streams.

Windows are half-open intervals [start, start + duration) laid out
contiguously from t0; gaps between records yield empty windows so the
resulting series is dense.  All boundary arithmetic uses exact integer
microseconds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from ..bgp.records import BgpUpdateRecord


@dataclass
class Window:
    start: int
    duration: int
    records: list[BgpUpdateRecord] = field(default_factory=list)

    @property
    def end(self) -> int:
        return self.start + self.duration

    @property
    def midpoint(self) -> float:
        return self.start + self.duration / 2.0


def iter_windows(
    records: Iterable[BgpUpdateRecord], window_seconds: int, t0: int
) -> Iterator[Window]:
    """Stream dense windows from a time-ordered record iterable.

    Single pass with only one window in memory; raises ValueError on
    out-of-order input or a record before t0 (use bin_stream for inputs
    that may need sorting first).
    """
    if window_seconds <= 0:
        raise ValueError("window_seconds must be positive")
    w_usec = window_seconds * 1_000_000
    t0_usec = t0 * 1_000_000
    index = 0
    current: list[BgpUpdateRecord] = []
    prev_usec = None
    for rec in records:
        ts = rec.timestamp_usec
        if ts < t0_usec:
            raise ValueError(f"record at {rec.timestamp} precedes t0={t0}")
        if prev_usec is not None and ts < prev_usec:
            raise ValueError("records are not sorted by timestamp")
        prev_usec = ts
        target = (ts - t0_usec) // w_usec
        while index < target:
            yield Window(start=t0 + index * window_seconds, duration=window_seconds, records=current)
            current = []
            index += 1
        current.append(rec)
    if prev_usec is not None:
        yield Window(start=t0 + index * window_seconds, duration=window_seconds, records=current)


def bin_stream(
    records: Iterable[BgpUpdateRecord], window_seconds: int, t0: int
) -> list[Window]:
    """Bin records into contiguous windows from t0 to the last timestamp.

    Out-of-order input is sorted first (stable, so same-timestamp records
    keep their relative order).  Returns an empty list for empty input.
    """
    ordered = sorted(records, key=lambda r: r.timestamp_usec)
    return list(iter_windows(ordered, window_seconds, t0))

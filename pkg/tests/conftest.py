import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sicnmaint.bgp.records import BgpUpdateRecord, Origin, PrefixAnnouncement


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_prefix(rng) -> str:
    bits = int(rng.integers(0, 33))
    mask = (0xFFFFFFFF << (32 - bits)) & 0xFFFFFFFF if bits else 0
    addr = int(rng.integers(0, 2**32)) & mask
    return f"{addr >> 24 & 255}.{addr >> 16 & 255}.{addr >> 8 & 255}.{addr & 255}/{bits}"


def random_record(rng, ts_sec=None) -> BgpUpdateRecord:
    """A random valid record (announcement paths shared, as one UPDATE carries)."""
    ts_sec = int(rng.integers(0, 2**31)) if ts_sec is None else ts_sec
    ts_usec = int(rng.integers(0, 1_000_000)) if rng.random() < 0.5 else 0
    peer = ".".join(str(int(x)) for x in rng.integers(1, 255, size=4))
    peer_as = int(rng.integers(1, 2**32))
    n_ann = int(rng.integers(0, 4))
    n_wd = int(rng.integers(0 if n_ann else 1, 4))
    path = tuple(int(a) for a in rng.integers(1, 2**32, size=int(rng.integers(1, 8))))
    origin = Origin(int(rng.integers(0, 3)))
    announced = [
        PrefixAnnouncement(prefix=random_prefix(rng), as_path=path, origin=origin)
        for _ in range(n_ann)
    ]
    withdrawn = [random_prefix(rng) for _ in range(n_wd)]
    return BgpUpdateRecord(
        ts_sec=ts_sec,
        ts_usec=ts_usec,
        peer_address=peer,
        peer_as=peer_as,
        announced=tuple(announced),
        withdrawn=tuple(withdrawn),
    )

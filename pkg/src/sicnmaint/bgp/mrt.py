"""MRT (RFC 6396) framing and the BGP4MP / BGP UPDATE (RFC 4271) subset.

Supported on input:
    * MRT types BGP4MP (16) and BGP4MP_ET (17), subtypes MESSAGE (1) and
      MESSAGE_AS4 (4), IPv4 address family only.
    * Embedded BGP UPDATE messages; ORIGIN, AS_PATH and AS4_PATH path
      attributes are decoded, everything else is ignored.

Everything else increments `records_skipped`.  A payload that cannot be
decoded inside a well-framed MRT record increments `malformed` and parsing
continues at the next record boundary; a broken frame (stream ends before
the declared record length) aborts with MrtParseError because there is no
safe way to resynchronize.

Serialization emits one MRT record per BgpUpdateRecord: BGP4MP/MESSAGE_AS4
when the timestamp has no microsecond part, BGP4MP_ET/MESSAGE_AS4 otherwise
(the extended-timestamp type is the only standard way to carry microseconds,
which the record type preserves across round trips).

All integers are big-endian.
"""

from __future__ import annotations

import io
import struct
from typing import BinaryIO, Iterator

from .records import (
    BgpUpdateRecord,
    Origin,
    ParseStats,
    PrefixAnnouncement,
    ValidationError,
    validate_record,
)

MRT_HEADER_LEN = 12
TYPE_BGP4MP = 16
TYPE_BGP4MP_ET = 17
SUBTYPE_MESSAGE = 1
SUBTYPE_MESSAGE_AS4 = 4
AFI_IPV4 = 1
BGP_MARKER = b"\xff" * 16
BGP_HEADER_LEN = 19
BGP_TYPE_UPDATE = 2
ATTR_ORIGIN = 1
ATTR_AS_PATH = 2
ATTR_AS4_PATH = 17
SEG_AS_SET = 1
SEG_AS_SEQUENCE = 2
FLAG_EXTENDED_LENGTH = 0x10


class MrtParseError(ValueError):
    """Unrecoverable framing error; carries the byte offset of the bad record."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class _PayloadError(ValueError):
    """Internal: malformed content inside a well-framed record."""


def _read_prefix(buf: bytes, pos: int, end: int) -> tuple[str, int]:
    if pos >= end:
        raise _PayloadError("truncated prefix length")
    bits = buf[pos]
    pos += 1
    if bits > 32:
        raise _PayloadError(f"prefix mask length {bits} > 32")
    nbytes = (bits + 7) // 8
    if pos + nbytes > end:
        raise _PayloadError("truncated prefix bytes")
    octets = bytearray(4)
    octets[:nbytes] = buf[pos : pos + nbytes]
    pos += nbytes
    # Zero any padding bits beyond the mask so prefixes are canonical.
    if bits % 8 and nbytes:
        octets[nbytes - 1] &= (0xFF << (8 - bits % 8)) & 0xFF
    addr = ".".join(str(b) for b in octets)
    return f"{addr}/{bits}", pos


def _write_prefix(prefix: str) -> bytes:
    addr, bits_str = prefix.split("/")
    bits = int(bits_str)
    nbytes = (bits + 7) // 8
    octets = bytes(int(p) for p in addr.split("."))
    return bytes([bits]) + octets[:nbytes]


def _decode_as_path(value: bytes, as_size: int) -> tuple[int, ...]:
    """Flatten AS_SEQUENCE/AS_SET segments into one AS tuple in encoded order."""
    path: list[int] = []
    pos = 0
    end = len(value)
    while pos < end:
        if pos + 2 > end:
            raise _PayloadError("truncated AS_PATH segment header")
        seg_type, count = value[pos], value[pos + 1]
        pos += 2
        if seg_type not in (SEG_AS_SET, SEG_AS_SEQUENCE):
            raise _PayloadError(f"unknown AS_PATH segment type {seg_type}")
        need = count * as_size
        if pos + need > end:
            raise _PayloadError("truncated AS_PATH segment body")
        for i in range(count):
            chunk = value[pos + i * as_size : pos + (i + 1) * as_size]
            path.append(int.from_bytes(chunk, "big"))
        pos += need
    return tuple(path)


def _decode_update(
    msg: bytes, as_size: int, ts_sec: int, ts_usec: int, peer_ip: str, peer_as: int
) -> BgpUpdateRecord | None:
    """Decode one BGP UPDATE body; returns None for empty (end-of-RIB) updates."""
    if len(msg) < BGP_HEADER_LEN:
        raise _PayloadError("BGP message shorter than header")
    if msg[:16] != BGP_MARKER:
        raise _PayloadError("bad BGP marker")
    (bgp_len,) = struct.unpack_from(">H", msg, 16)
    bgp_type = msg[18]
    if bgp_len != len(msg):
        raise _PayloadError("BGP length field disagrees with payload size")
    if bgp_type != BGP_TYPE_UPDATE:
        return None  # caller counts as skipped

    pos = BGP_HEADER_LEN
    end = len(msg)
    if pos + 2 > end:
        raise _PayloadError("truncated withdrawn-routes length")
    (wd_len,) = struct.unpack_from(">H", msg, pos)
    pos += 2
    wd_end = pos + wd_len
    if wd_end > end:
        raise _PayloadError("withdrawn routes overrun message")
    withdrawn: list[str] = []
    while pos < wd_end:
        pfx, pos = _read_prefix(msg, pos, wd_end)
        withdrawn.append(pfx)

    if pos + 2 > end:
        raise _PayloadError("truncated path-attribute length")
    (attr_len,) = struct.unpack_from(">H", msg, pos)
    pos += 2
    attr_end = pos + attr_len
    if attr_end > end:
        raise _PayloadError("path attributes overrun message")

    origin: Origin | None = None
    as_path: tuple[int, ...] | None = None
    as4_path: tuple[int, ...] | None = None
    while pos < attr_end:
        if pos + 3 > attr_end:
            raise _PayloadError("truncated attribute header")
        flags, attr_type = msg[pos], msg[pos + 1]
        if flags & FLAG_EXTENDED_LENGTH:
            if pos + 4 > attr_end:
                raise _PayloadError("truncated extended attribute header")
            (length,) = struct.unpack_from(">H", msg, pos + 2)
            vpos = pos + 4
        else:
            length = msg[pos + 2]
            vpos = pos + 3
        if vpos + length > attr_end:
            raise _PayloadError("attribute value overruns attribute section")
        value = msg[vpos : vpos + length]
        if attr_type == ATTR_ORIGIN:
            if length != 1 or value[0] > 2:
                raise _PayloadError("bad ORIGIN attribute")
            origin = Origin(value[0])
        elif attr_type == ATTR_AS_PATH:
            as_path = _decode_as_path(value, as_size)
        elif attr_type == ATTR_AS4_PATH:
            as4_path = _decode_as_path(value, 4)
        # all other attributes ignored for forward compatibility
        pos = vpos + length

    nlri: list[str] = []
    pos = attr_end
    while pos < end:
        pfx, pos = _read_prefix(msg, pos, end)
        nlri.append(pfx)

    if not nlri and not withdrawn:
        return None  # empty UPDATE (end-of-RIB marker): skipped

    announced: tuple[PrefixAnnouncement, ...] = ()
    if nlri:
        path = as4_path if as4_path is not None else as_path
        if path is None or origin is None:
            raise _PayloadError("announcement without AS_PATH/ORIGIN")
        if len(path) == 0 or any(a == 0 for a in path):
            raise _PayloadError("AS_PATH empty or contains AS 0")
        announced = tuple(
            PrefixAnnouncement(prefix=p, as_path=path, origin=origin) for p in nlri
        )

    return BgpUpdateRecord(
        ts_sec=ts_sec,
        ts_usec=ts_usec,
        peer_address=peer_ip,
        peer_as=peer_as,
        announced=announced,
        withdrawn=tuple(withdrawn),
    )


def _decode_bgp4mp(
    payload: bytes, subtype: int, ts_sec: int, ts_usec: int
) -> BgpUpdateRecord | None:
    as_size = 4 if subtype == SUBTYPE_MESSAGE_AS4 else 2
    head_fmt = ">IIHH" if as_size == 4 else ">HHHH"
    head_len = struct.calcsize(head_fmt)
    if len(payload) < head_len:
        raise _PayloadError("truncated BGP4MP header")
    peer_as, _local_as, _ifindex, afi = struct.unpack_from(head_fmt, payload, 0)
    if afi != AFI_IPV4:
        return None  # IPv6 sessions are out of scope: skipped
    pos = head_len
    if len(payload) < pos + 8:
        raise _PayloadError("truncated BGP4MP addresses")
    peer_ip = ".".join(str(b) for b in payload[pos : pos + 4])
    pos += 8
    return _decode_update(payload[pos:], as_size, ts_sec, ts_usec, peer_ip, peer_as)


def iter_mrt(source: bytes | BinaryIO, stats: ParseStats) -> Iterator[BgpUpdateRecord]:
    """Stream BgpUpdateRecords out of concatenated MRT records.

    `stats` is updated as records are consumed and is final once the
    iterator is exhausted.  Raises MrtParseError on a broken frame.
    """
    stream: BinaryIO = io.BytesIO(source) if isinstance(source, bytes) else source
    offset = 0
    while True:
        header = stream.read(MRT_HEADER_LEN)
        if not header:
            return
        if len(header) < MRT_HEADER_LEN:
            stats.malformed += 1
            raise MrtParseError("truncated MRT header", offset)
        ts_sec, mrt_type, subtype, length = struct.unpack(">IHHI", header)
        payload = stream.read(length)
        if len(payload) < length:
            stats.malformed += 1
            raise MrtParseError(
                f"payload shorter than declared length {length}", offset
            )
        offset += MRT_HEADER_LEN + length

        if mrt_type not in (TYPE_BGP4MP, TYPE_BGP4MP_ET) or subtype not in (
            SUBTYPE_MESSAGE,
            SUBTYPE_MESSAGE_AS4,
        ):
            stats.records_skipped += 1
            continue
        ts_usec = 0
        if mrt_type == TYPE_BGP4MP_ET:
            if len(payload) < 4:
                stats.malformed += 1
                continue
            (ts_usec,) = struct.unpack_from(">I", payload, 0)
            payload = payload[4:]
            if ts_usec >= 1_000_000:
                stats.malformed += 1
                continue
        try:
            record = _decode_bgp4mp(payload, subtype, ts_sec, ts_usec)
        except _PayloadError:
            stats.malformed += 1
            continue
        if record is None:
            stats.records_skipped += 1
            continue
        stats.records_emitted += 1
        yield record


def parse_mrt(
    source: bytes | BinaryIO,
) -> tuple[Iterator[BgpUpdateRecord], ParseStats]:
    """Lazily parse an MRT byte stream.

    Returns (record iterator, stats); the stats counters are live and
    settle once the iterator is exhausted.
    """
    stats = ParseStats()
    return iter_mrt(source, stats), stats


def load_mrt(path) -> tuple[list[BgpUpdateRecord], ParseStats]:
    """Parse a whole MRT file into memory."""
    with open(path, "rb") as fh:
        records, stats = parse_mrt(fh)
        return list(records), stats


def _encode_as_path(path: tuple[int, ...]) -> bytes:
    out = bytearray()
    for i in range(0, len(path), 255):
        seg = path[i : i + 255]
        out.append(SEG_AS_SEQUENCE)
        out.append(len(seg))
        for asn in seg:
            out += asn.to_bytes(4, "big")
    return bytes(out)


def _encode_attr(attr_type: int, value: bytes) -> bytes:
    flags = 0x40  # well-known transitive
    if len(value) > 255:
        return struct.pack(">BBH", flags | FLAG_EXTENDED_LENGTH, attr_type, len(value)) + value
    return struct.pack(">BBB", flags, attr_type, len(value)) + value


def serialize_mrt(record: BgpUpdateRecord) -> bytes:
    """Encode one record as a single MESSAGE_AS4 MRT record.

    The record must satisfy all invariants, and every announcement must
    carry the same (as_path, origin) pair because one UPDATE has a single
    path-attribute section; violations raise ValidationError naming the
    field.  parse_mrt(serialize_mrt(r)) yields exactly r.
    """
    validate_record(record)
    paths = {(a.as_path, a.origin) for a in record.announced}
    if len(paths) > 1:
        raise ValidationError(
            "announced: announcements in one record must share as_path and origin"
        )

    wd = b"".join(_write_prefix(p) for p in record.withdrawn)
    attrs = b""
    nlri = b""
    if record.announced:
        as_path, origin = record.announced[0].as_path, record.announced[0].origin
        attrs = _encode_attr(ATTR_ORIGIN, bytes([int(origin)])) + _encode_attr(
            ATTR_AS_PATH, _encode_as_path(as_path)
        )
        nlri = b"".join(_write_prefix(a.prefix) for a in record.announced)

    body = struct.pack(">H", len(wd)) + wd + struct.pack(">H", len(attrs)) + attrs + nlri
    bgp_msg = BGP_MARKER + struct.pack(">HB", BGP_HEADER_LEN + len(body), BGP_TYPE_UPDATE) + body

    peer_ip = bytes(int(p) for p in record.peer_address.split("."))
    bgp4mp = (
        struct.pack(">IIHH", record.peer_as, 0, 0, AFI_IPV4)
        + peer_ip
        + bytes(4)
        + bgp_msg
    )
    if record.ts_usec:
        payload = struct.pack(">I", record.ts_usec) + bgp4mp
        mrt_type = TYPE_BGP4MP_ET
    else:
        payload = bgp4mp
        mrt_type = TYPE_BGP4MP
    header = struct.pack(">IHHI", record.ts_sec, mrt_type, SUBTYPE_MESSAGE_AS4, len(payload))
    return header + payload


def write_mrt(records, path) -> int:
    """Serialize records to an MRT file; returns the record count."""
    count = 0
    with open(path, "wb") as fh:
        for rec in records:
            fh.write(serialize_mrt(rec))
            count += 1
    return count

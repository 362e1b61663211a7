"""Plain-text interchange format for BGP update streams.

One line per announcement or withdrawal, UTF-8, `#` comments and blank
lines ignored:

    ts|peer_ip|peer_as|A|prefix|as1 as2 ...|origin
    ts|peer_ip|peer_as|W|prefix

`ts` is decimal seconds with an optional fractional part (microsecond
resolution).  Whitespace around `|` separators is ignored.  A record with
several announcements or withdrawals is written as several lines.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .records import (
    BgpUpdateRecord,
    Origin,
    PrefixAnnouncement,
    ValidationError,
    normalize_prefix,
    origin_from_token,
    validate_peer_address,
    validate_record,
)


class TextFormatError(ValueError):
    pass


def _fail(msg: str, lineno: int | None) -> None:
    where = f"line {lineno}: " if lineno is not None else ""
    raise TextFormatError(f"{where}{msg}")


def _parse_ts(token: str, lineno: int | None) -> tuple[int, int]:
    sec_part, _, frac = token.partition(".")
    if not sec_part.isdigit() or (frac and not frac.isdigit()) or len(frac) > 6:
        _fail(f"bad timestamp {token!r}", lineno)
    usec = int(frac.ljust(6, "0")) if frac else 0
    return int(sec_part), usec


def parse_update_line(line: str, lineno: int | None = None) -> BgpUpdateRecord:
    """Parse one text line into a single-announcement or withdrawal record."""
    fields = [f.strip() for f in line.split("|")]
    if len(fields) == 5:
        ts_tok, peer_ip, peer_as_tok, kind, prefix = fields
        if kind != "W":
            _fail(f"5-field line must be a withdrawal, got kind {kind!r}", lineno)
        path_tok = origin_tok = None
    elif len(fields) == 7:
        ts_tok, peer_ip, peer_as_tok, kind, prefix, path_tok, origin_tok = fields
        if kind != "A":
            _fail(f"7-field line must be an announcement, got kind {kind!r}", lineno)
    else:
        _fail(f"expected 5 or 7 fields, got {len(fields)}", lineno)

    ts_sec, ts_usec = _parse_ts(ts_tok, lineno)
    if not peer_as_tok.isdigit():
        _fail(f"bad peer AS {peer_as_tok!r}", lineno)
    try:
        peer_ip = validate_peer_address(peer_ip)
        prefix = normalize_prefix(prefix)
        if kind == "A":
            path = tuple(int(t) for t in path_tok.split())
            if not path:
                raise ValidationError("as_path: must be non-empty")
            origin = origin_from_token(origin_tok)
            record = BgpUpdateRecord(
                ts_sec=ts_sec,
                ts_usec=ts_usec,
                peer_address=peer_ip,
                peer_as=int(peer_as_tok),
                announced=(
                    PrefixAnnouncement(prefix=prefix, as_path=path, origin=origin),
                ),
            )
        else:
            record = BgpUpdateRecord(
                ts_sec=ts_sec,
                ts_usec=ts_usec,
                peer_address=peer_ip,
                peer_as=int(peer_as_tok),
                withdrawn=(prefix,),
            )
        validate_record(record)
    except (ValidationError, ValueError) as exc:
        _fail(str(exc), lineno)
    return record


def _format_ts(record: BgpUpdateRecord) -> str:
    if record.ts_usec:
        return f"{record.ts_sec}.{record.ts_usec:06d}"
    return str(record.ts_sec)


def format_update_lines(record: BgpUpdateRecord) -> list[str]:
    """Render a record as text lines, one per announcement/withdrawal."""
    validate_record(record)
    ts = _format_ts(record)
    head = f"{ts}|{record.peer_address}|{record.peer_as}"
    lines = [f"{head}|W|{pfx}" for pfx in record.withdrawn]
    for ann in record.announced:
        path = " ".join(str(a) for a in ann.as_path)
        lines.append(f"{head}|A|{ann.prefix}|{path}|{ann.origin.name}")
    return lines


def iter_update_lines(lines: Iterable[str]) -> Iterator[BgpUpdateRecord]:
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield parse_update_line(line, lineno=lineno)


def read_update_log(path) -> list[BgpUpdateRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        return list(iter_update_lines(fh))


def write_update_log(records: Iterable[BgpUpdateRecord], path) -> int:
    """Write records as text lines; returns the line count."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            for line in format_update_lines(rec):
                fh.write(line + "\n")
                count += 1
    return count

"""Canonical in-memory representation of BGP UPDATE records.

A record is one timestamped UPDATE from a peer: zero or more prefix
announcements (each carrying its AS path and origin) plus zero or more
withdrawn prefixes.  Records are plain immutable values; validation is a
separate step so parsers can assemble them incrementally and serializers
can reject bad input with a named field.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field
from enum import IntEnum


class ValidationError(ValueError):
    """A record violates an invariant; the message names the offending field."""


class Origin(IntEnum):
    IGP = 0
    EGP = 1
    INCOMPLETE = 2


_ORIGIN_TOKENS = {o.name: o for o in Origin}


def normalize_prefix(prefix: str) -> str:
    """Validate an IPv4 CIDR string and zero any host bits.

    Raises ValidationError on anything that is not `a.b.c.d/m` with
    0 <= m <= 32.
    """
    try:
        net = ipaddress.ip_network(prefix, strict=False)
    except ValueError as exc:
        raise ValidationError(f"prefix: {exc}") from exc
    if net.version != 4:
        raise ValidationError(f"prefix: {prefix!r} is not IPv4")
    return str(net)


def validate_peer_address(address: str) -> str:
    try:
        return str(ipaddress.IPv4Address(address))
    except ValueError as exc:
        raise ValidationError(f"peer_address: {exc}") from exc


@dataclass(frozen=True)
class PrefixAnnouncement:
    """One announced prefix with the path attributes it was announced under."""

    prefix: str
    as_path: tuple[int, ...]
    origin: Origin = Origin.IGP


@dataclass(frozen=True)
class BgpUpdateRecord:
    """One BGP UPDATE as seen from a peer session.

    Timestamps are split into whole seconds and microseconds since the
    Unix epoch so binary and text round trips are exact.
    """

    ts_sec: int
    ts_usec: int
    peer_address: str
    peer_as: int
    announced: tuple[PrefixAnnouncement, ...] = ()
    withdrawn: tuple[str, ...] = ()

    @property
    def timestamp(self) -> float:
        return self.ts_sec + self.ts_usec / 1_000_000.0

    @property
    def timestamp_usec(self) -> int:
        """Exact integer microseconds since the epoch (safe to compare)."""
        return self.ts_sec * 1_000_000 + self.ts_usec


def validate_record(record: BgpUpdateRecord) -> None:
    """Check every record invariant, raising ValidationError naming the field."""
    if not isinstance(record.ts_sec, int) or record.ts_sec < 0:
        raise ValidationError("ts_sec: must be a non-negative integer")
    if not isinstance(record.ts_usec, int) or not 0 <= record.ts_usec < 1_000_000:
        raise ValidationError("ts_usec: must be an integer in [0, 1000000)")
    if record.ts_sec > 0xFFFFFFFF:
        raise ValidationError("ts_sec: exceeds 32-bit range")
    validate_peer_address(record.peer_address)
    if not 0 <= record.peer_as <= 0xFFFFFFFF:
        raise ValidationError("peer_as: must fit in 32 bits")
    if not record.announced and not record.withdrawn:
        raise ValidationError("announced/withdrawn: must not both be empty")
    for ann in record.announced:
        if normalize_prefix(ann.prefix) != ann.prefix:
            raise ValidationError(f"announced.prefix: {ann.prefix!r} not canonical")
        if len(ann.as_path) == 0:
            raise ValidationError("announced.as_path: must be non-empty")
        for asn in ann.as_path:
            if not 0 < asn <= 0xFFFFFFFF:
                raise ValidationError(
                    f"announced.as_path: AS {asn} out of range (zero forbidden)"
                )
        if not isinstance(ann.origin, Origin):
            raise ValidationError(f"announced.origin: {ann.origin!r} not an Origin")
    for pfx in record.withdrawn:
        if normalize_prefix(pfx) != pfx:
            raise ValidationError(f"withdrawn: {pfx!r} not canonical")


def origin_from_token(token: str) -> Origin:
    try:
        return _ORIGIN_TOKENS[token]
    except KeyError:
        raise ValidationError(f"origin: unknown token {token!r}") from None


@dataclass
class ParseStats:
    """Accounting for one parse run.

    records_emitted + records_skipped + malformed always equals the number
    of MRT records encountered in the input, including a trailing truncated
    fragment when parsing aborts.
    """

    records_emitted: int = 0
    records_skipped: int = 0
    malformed: int = 0

    @property
    def total(self) -> int:
        return self.records_emitted + self.records_skipped + self.malformed

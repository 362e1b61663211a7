from .records import (
    Origin,
    PrefixAnnouncement,
    BgpUpdateRecord,
    ParseStats,
    ValidationError,
    validate_record,
)
from .mrt import MrtParseError, parse_mrt, iter_mrt, serialize_mrt, load_mrt, write_mrt
from .textlog import (
    TextFormatError,
    parse_update_line,
    format_update_lines,
    read_update_log,
    write_update_log,
)

__all__ = [
    "Origin",
    "PrefixAnnouncement",
    "BgpUpdateRecord",
    "ParseStats",
    "ValidationError",
    "validate_record",
    "MrtParseError",
    "parse_mrt",
    "iter_mrt",
    "serialize_mrt",
    "load_mrt",
    "write_mrt",
    "TextFormatError",
    "parse_update_line",
    "format_update_lines",
    "read_update_log",
    "write_update_log",
]

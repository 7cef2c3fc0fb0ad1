"""Read record files and apply the keyword / time-of-day query."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Sequence

from .model import Dataset, GeoRecord, RegionError, validate_dataset

FIELDS = ("text", "lat", "lon", "created_at")
FEED_FORMAT = "%a %b %d %H:%M:%S %z %Y"  # e.g. "Wed Jun 01 09:00:00 +0000 2016"


class ParseError(RegionError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnsupportedTimestampFormat(ParseError):
    pass


@dataclass(frozen=True)
class QuerySpec:
    keywords: tuple[str, ...]
    case_sensitive: bool = False
    start_hour: float = 8
    end_hour: float = 20
    utc_offset_min: int = 60

    def __post_init__(self):
        if isinstance(self.keywords, str):
            raise TypeError("keywords must be a sequence of strings, not a string")
        kws = tuple(k.strip() for k in self.keywords)
        if not kws or any(not k for k in kws):
            raise ValueError("keywords must be non-empty strings")
        if not 0 <= self.start_hour < self.end_hour <= 24:
            raise ValueError("need 0 <= start_hour < end_hour <= 24")
        object.__setattr__(self, "keywords", kws)


def parse_timestamp(value: str) -> int:
    """ISO-8601 or the classic social-feed layout, to integer epoch seconds (UTC).

    Naive ISO values are taken as UTC; fractional seconds are floored.
    """
    if not isinstance(value, str) or not value.strip():
        raise UnsupportedTimestampFormat(f"empty or non-string timestamp {value!r}")
    s = value.strip()
    dt = None
    try:
        dt = datetime.strptime(s, FEED_FORMAT)
    except ValueError:
        iso = s[:-1] + "+00:00" if s.endswith(("Z", "z")) else s
        try:
            dt = datetime.fromisoformat(iso)
        except ValueError:
            pass
    if dt is None:
        raise UnsupportedTimestampFormat(f"unrecognised timestamp {value!r}")
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return math.floor(dt.timestamp())


def _coord(value, name: str, line: int) -> float:
    if isinstance(value, bool) or value is None:
        raise ParseError(f"{name} is not a number: {value!r}", line)
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ParseError(f"{name} is not a number: {value!r}", line) from None
    if not math.isfinite(out):
        raise ParseError(f"{name} is not finite: {value!r}", line)
    return out


def _record(row: dict, line: int) -> GeoRecord:
    missing = [k for k in FIELDS if k not in row or row[k] is None]
    if missing:
        raise ParseError(f"missing field(s) {', '.join(missing)}", line)
    text = row["text"]
    if not isinstance(text, str):
        raise ParseError("text must be a string", line)
    lat = _coord(row["lat"], "lat", line)
    lon = _coord(row["lon"], "lon", line)
    try:
        ts = parse_timestamp(row["created_at"])
    except UnsupportedTimestampFormat as exc:
        raise UnsupportedTimestampFormat(str(exc), line) from None
    try:
        return GeoRecord(lat, lon, ts, text)
    except RegionError as exc:
        raise ParseError(str(exc), line) from exc


def parse_records(path, format: str = "jsonl") -> list[GeoRecord]:
    """One record per data line, in file order. Blank JSONL lines are skipped."""
    if format not in ("jsonl", "csv"):
        raise ValueError(f"unknown format {format!r}")
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        if format == "jsonl":
            for lineno, raw in enumerate(fh, start=1):
                if not raw.strip():
                    continue
                try:
                    row = json.loads(raw)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"invalid JSON ({exc.msg})", lineno) from None
                if not isinstance(row, dict):
                    raise ParseError("expected a JSON object", lineno)
                out.append(_record(row, lineno))
        else:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                return out
            absent = [k for k in FIELDS if k not in reader.fieldnames]
            if absent:
                raise ParseError(f"CSV header lacks {', '.join(absent)}", 1)
            for row in reader:
                out.append(_record(row, reader.line_num))
    return out


def _local_seconds(ts: int, offset_min: int) -> int:
    return (ts + offset_min * 60) % 86_400


def matches(record: GeoRecord, query: QuerySpec) -> bool:
    text = record.text if query.case_sensitive else record.text.casefold()
    kws = query.keywords if query.case_sensitive else tuple(k.casefold() for k in query.keywords)
    if not any(k in text for k in kws):
        return False
    tod = _local_seconds(record.timestamp, query.utc_offset_min)
    return query.start_hour * 3600 <= tod < query.end_hour * 3600


def filter_records(records: Iterable[GeoRecord], query: QuerySpec) -> Dataset:
    return validate_dataset(r for r in records if matches(r, query))


def write_records(records: Sequence[GeoRecord], path, format: str = "jsonl") -> None:
    """Write records back out; ``created_at`` is emitted as ISO-8601 UTC."""
    def iso(ts):
        return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")

    with open(path, "w", encoding="utf-8", newline="") as fh:
        if format == "jsonl":
            for r in records:
                fh.write(json.dumps({"text": r.text, "lat": r.lat, "lon": r.lon, "created_at": iso(r.timestamp)}) + "\n")
        elif format == "csv":
            w = csv.writer(fh)
            w.writerow(FIELDS)
            for r in records:
                w.writerow([r.text, repr(r.lat), repr(r.lon), iso(r.timestamp)])
        else:
            raise ValueError(f"unknown format {format!r}")

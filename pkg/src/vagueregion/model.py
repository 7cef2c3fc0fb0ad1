"""Core domain types shared across the pipeline.

All types are immutable after construction. Coordinates are degrees,
timestamps are integer seconds since the Unix epoch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

import numpy as np

NOISE = -1

STOP_NO_MAJOR = "no-major-cluster"
STOP_REGULARITY = "regularity-violated"
STOP_EXHAUSTED = "schedule-exhausted"
STOP_REASONS = (STOP_NO_MAJOR, STOP_REGULARITY, STOP_EXHAUSTED)


class RegionError(Exception):
    """Base class for every error raised by this package."""


class InvalidCoordinate(RegionError, ValueError):
    pass


class InvalidTimestamp(RegionError, ValueError):
    pass


class DegenerateDataset(RegionError, ValueError):
    pass


class EmptyDataset(RegionError, ValueError):
    pass


@dataclass(frozen=True)
class GeoRecord:
    lat: float
    lon: float
    timestamp: int
    text: str = ""

    def __post_init__(self):
        lat, lon = float(self.lat), float(self.lon)
        if not (math.isfinite(lat) and -90.0 <= lat <= 90.0):
            raise InvalidCoordinate(f"latitude out of range: {self.lat!r}")
        if not (math.isfinite(lon) and -180.0 <= lon <= 180.0):
            raise InvalidCoordinate(f"longitude out of range: {self.lon!r}")
        if isinstance(self.timestamp, bool) or int(self.timestamp) != self.timestamp:
            raise InvalidTimestamp(f"timestamp must be an integer: {self.timestamp!r}")
        if self.timestamp < 0:
            raise InvalidTimestamp(f"negative timestamp: {self.timestamp}")
        object.__setattr__(self, "lat", lat)
        object.__setattr__(self, "lon", lon)
        object.__setattr__(self, "timestamp", int(self.timestamp))
        object.__setattr__(self, "text", "" if self.text is None else str(self.text))

    def sort_key(self):
        return (self.timestamp, self.lat, self.lon, self.text)


@dataclass(frozen=True)
class Dataset:
    """Canonically ordered records (timestamp, then lat, lon, text).

    Build through :func:`validate_dataset`; the constructor trusts its input.
    """

    records: tuple[GeoRecord, ...] = ()

    def __len__(self) -> int:
        return len(self.records)

    @property
    def n(self) -> int:
        return len(self.records)

    @cached_property
    def lat(self) -> np.ndarray:
        arr = np.array([r.lat for r in self.records], dtype=np.float64)
        arr.flags.writeable = False
        return arr

    @cached_property
    def lon(self) -> np.ndarray:
        arr = np.array([r.lon for r in self.records], dtype=np.float64)
        arr.flags.writeable = False
        return arr

    @cached_property
    def timestamps(self) -> np.ndarray:
        arr = np.array([r.timestamp for r in self.records], dtype=np.int64)
        arr.flags.writeable = False
        return arr

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return validate_dataset(self.records[i] for i in indices)


def validate_dataset(records: Iterable[GeoRecord]) -> Dataset:
    """Check every record and return them as a canonically sorted Dataset.

    Duplicates are kept: repeated locations matter to the adaptive MinPts rule.
    """
    checked = []
    for rec in records:
        if not isinstance(rec, GeoRecord):
            raise TypeError(f"expected GeoRecord, got {type(rec).__name__}")
        # re-run validation in case the record was built with object.__new__
        GeoRecord(rec.lat, rec.lon, rec.timestamp, rec.text)
        checked.append(rec)
    checked.sort(key=GeoRecord.sort_key)
    return Dataset(tuple(checked))


@dataclass(frozen=True)
class ClusterResult:
    """Per-point cluster labels; ids run 1..N, :data:`NOISE` marks noise."""

    labels: np.ndarray
    core: Optional[np.ndarray] = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        if self.core is not None:
            core = np.asarray(self.core, dtype=bool)
            core.flags.writeable = False
            object.__setattr__(self, "core", core)

    @property
    def n(self) -> int:
        return int(self.labels.size)

    @cached_property
    def cluster_count(self) -> int:
        return int(self.labels.max(initial=0))

    @cached_property
    def cluster_sizes(self) -> tuple[int, ...]:
        counts = np.bincount(self.labels[self.labels > 0], minlength=self.cluster_count + 1)
        return tuple(int(c) for c in counts[1:])

    @cached_property
    def noise_size(self) -> int:
        return int(np.count_nonzero(self.labels == NOISE))

    def members(self, cluster_id: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster_id)


@dataclass(frozen=True)
class EpsilonSchedule:
    """Strictly decreasing positive radii to try, largest first."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(v <= 0 or not math.isfinite(v) for v in vals):
            raise ValueError("schedule radii must be finite and positive")
        if any(a <= b for a, b in zip(vals, vals[1:])):
            raise ValueError("schedule must be strictly decreasing")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    @property
    def count(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class EntropyReport:
    per_cluster_entropy: dict[int, float]
    h_max: float
    h_min: float
    delta: float


@dataclass(frozen=True)
class IterationRecord:
    index: int
    eps: float
    min_pts: float
    cluster_count: int
    cluster_sizes: tuple[int, ...]
    noise_size: int
    entropies: tuple[float, ...]
    delta: Optional[float]
    major_id: Optional[int]
    outcome: str  # accepted | stop-no-major | stop-regularity-violated

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "eps": self.eps,
            "min_pts": self.min_pts,
            "cluster_count": self.cluster_count,
            "cluster_sizes": list(self.cluster_sizes),
            "noise_size": self.noise_size,
            "entropies": list(self.entropies),
            "delta": self.delta,
            "major_id": self.major_id,
            "outcome": self.outcome,
        }


@dataclass(frozen=True)
class DelineationResult:
    epsilon_star: float
    member_indices: tuple[int, ...]
    trace: tuple[IterationRecord, ...]
    stop_reason: str
    schedule: EpsilonSchedule

    @property
    def iterations(self) -> int:
        return len(self.trace)


@dataclass(frozen=True)
class RegionPolygon:
    """Polygons in lon/lat degrees.

    ``polygons`` holds one entry per polygon; each entry is a list of closed
    rings, exterior first, then holes. A ring is a sequence of (lon, lat).
    """

    polygons: tuple[tuple[tuple[tuple[float, float], ...], ...], ...]
    label: str = ""

    def __post_init__(self):
        polys = []
        for poly in self.polygons:
            rings = []
            for ring in poly:
                pts = tuple((float(x), float(y)) for x, y in ring)
                if len(pts) < 4:
                    raise ValueError("a ring needs at least 4 vertices (closed triangle)")
                if pts[0] != pts[-1]:
                    raise ValueError("ring is not closed")
                rings.append(pts)
            if not rings:
                raise ValueError("polygon without rings")
            polys.append(tuple(rings))
        object.__setattr__(self, "polygons", tuple(polys))

    @property
    def rings(self) -> list[tuple[tuple[float, float], ...]]:
        return [ring for poly in self.polygons for ring in poly]

    def bounds(self) -> tuple[float, float, float, float]:
        """(lon_min, lat_min, lon_max, lat_max)."""
        pts = np.array([p for ring in self.rings for p in ring])
        return (float(pts[:, 0].min()), float(pts[:, 1].min()),
                float(pts[:, 0].max()), float(pts[:, 1].max()))


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    samples_total: int
    samples_in_R: int
    samples_in_Rhat: int
    samples_in_both: int
    rng_seed: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "samples_total": self.samples_total,
            "samples_in_R": self.samples_in_R,
            "samples_in_Rhat": self.samples_in_Rhat,
            "samples_in_both": self.samples_in_both,
            "rng_seed": self.rng_seed,
        }


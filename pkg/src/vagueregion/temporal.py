"""Inter-event intervals, their Shannon entropy, and the regularity test."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .model import ClusterResult, Dataset, EntropyReport, RegionError


class UnknownCluster(RegionError, KeyError):
    pass


class EmptyList(RegionError, ValueError):
    pass


@dataclass(frozen=True)
class IntervalSeries:
    intervals: tuple[int, ...]
    bin_width: int = 1

    def __post_init__(self):
        if int(self.bin_width) != self.bin_width or self.bin_width < 1:
            raise ValueError("bin_width must be a positive integer")
        vals = tuple(int(v) for v in self.intervals)
        if any(v < 0 for v in vals):
            raise ValueError("intervals must be nonnegative")
        object.__setattr__(self, "intervals", vals)
        object.__setattr__(self, "bin_width", int(self.bin_width))

    def __len__(self):
        return len(self.intervals)


def interval_series(data: Dataset, result: ClusterResult, cluster_id: int, bin_width: int = 1) -> IntervalSeries:
    members = result.members(cluster_id)
    if cluster_id < 1 or members.size == 0:
        raise UnknownCluster(cluster_id)
    # dataset order is chronological, so member timestamps are already sorted
    ts = data.timestamps[members]
    return IntervalSeries(tuple(np.diff(ts).tolist()), bin_width)


def shannon_entropy(series: IntervalSeries) -> float:
    """Base-10 entropy of the empirical distribution of binned intervals."""
    if len(series) < 2:
        return 0.0
    bins = np.asarray(series.intervals, dtype=np.int64) // series.bin_width
    _, counts = np.unique(bins, return_counts=True)
    if counts.size == 1:
        return 0.0
    # summing in sorted-count order makes H a function of the count multiset only
    p = np.sort(counts) / bins.size
    return float(-np.sum(p * np.log10(p)))


def compute_delta(entropies: Iterable[float]) -> float:
    values = list(entropies)
    if not values:
        raise EmptyList("need at least one entropy value")
    return (max(values) - min(values)) / 2.0


def regularity_satisfied(entropies: Mapping[int, float], major_id: int, delta: float) -> bool:
    """Every other cluster must be at least ``delta`` more irregular than the major one.

    When ``delta`` is 0 (all entropies equal) a sibling that is merely as
    regular as the major cluster does not count as more irregular.
    """
    if major_id not in entropies:
        raise UnknownCluster(major_id)
    h_major = entropies[major_id]
    for cid, h in entropies.items():
        if cid == major_id:
            continue
        gap = h - h_major
        if gap < delta or gap <= 0.0:
            return False
    return True


def entropy_report(data: Dataset, result: ClusterResult, bin_width: int = 1) -> EntropyReport:
    per = {cid: shannon_entropy(interval_series(data, result, cid, bin_width))
           for cid in range(1, result.cluster_count + 1)}
    if not per:
        raise EmptyList("no clusters")
    values = per.values()
    return EntropyReport(per, max(values), min(values), compute_delta(values))

"""Distance metrics, radius queries and single-linkage merge heights."""
from __future__ import annotations

import enum
import math
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .model import Dataset, DegenerateDataset, EpsilonSchedule

EARTH_RADIUS_M = 6_371_000.0

# kd-tree radii are widened by this factor before the exact filter, so the
# tree's own rounding can never drop a pair sitting exactly on the ball boundary
_SLACK = 1e-9


class Metric(str, enum.Enum):
    EUCLIDEAN_DEGREES = "euclidean_degrees"
    HAVERSINE_METERS = "haversine_meters"


def pair_distance(lat1, lon1, lat2, lon2, metric: Metric = Metric.EUCLIDEAN_DEGREES):
    """Elementwise distance; broadcasts like any numpy ufunc.

    Every distance in the package goes through here, so values compared
    against merge heights are bit-identical to the heights themselves.
    """
    metric = Metric(metric)
    lat1 = np.asarray(lat1, dtype=np.float64)
    lat2 = np.asarray(lat2, dtype=np.float64)
    lon1 = np.asarray(lon1, dtype=np.float64)
    lon2 = np.asarray(lon2, dtype=np.float64)
    if metric is Metric.EUCLIDEAN_DEGREES:
        dlat = lat1 - lat2
        dlon = lon1 - lon2
        return np.sqrt(dlat * dlat + dlon * dlon)
    p1 = np.radians(lat1)
    p2 = np.radians(lat2)
    s_lat = np.sin((p1 - p2) * 0.5)
    s_lon = np.sin(np.radians(lon1 - lon2) * 0.5)
    h = s_lat * s_lat + (np.cos(p1) * np.cos(p2)) * (s_lon * s_lon)
    return 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))


def distance(a, b, metric: Metric = Metric.EUCLIDEAN_DEGREES) -> float:
    """Distance between two objects exposing ``lat`` and ``lon``."""
    return float(pair_distance(a.lat, a.lon, b.lat, b.lon, metric))


def _embed(lat: np.ndarray, lon: np.ndarray, metric: Metric) -> np.ndarray:
    if metric is Metric.EUCLIDEAN_DEGREES:
        return np.column_stack([lat, lon])
    phi = np.radians(lat)
    lam = np.radians(lon)
    return np.column_stack([np.cos(phi) * np.cos(lam), np.cos(phi) * np.sin(lam), np.sin(phi)])


def _tree_radius(eps: float, metric: Metric) -> float:
    if metric is Metric.EUCLIDEAN_DEGREES:
        r = eps
    else:
        angle = eps / EARTH_RADIUS_M
        r = 2.0 if angle >= math.pi else 2.0 * math.sin(angle / 2.0)
    return r * (1.0 + _SLACK) + 1e-12


class NeighborIndex:
    """Closed-ball radius queries over a fixed point set.

    A kd-tree proposes candidates with a slightly widened radius; membership
    is then decided with :func:`pair_distance`, so ``d <= eps`` is exact.
    """

    def __init__(self, lat, lon, metric: Metric = Metric.EUCLIDEAN_DEGREES):
        self.metric = Metric(metric)
        self.lat = np.ascontiguousarray(lat, dtype=np.float64)
        self.lon = np.ascontiguousarray(lon, dtype=np.float64)
        self.n = int(self.lat.size)
        self._tree = cKDTree(_embed(self.lat, self.lon, self.metric)) if self.n else None
        self._pairs: Optional[tuple[float, np.ndarray, np.ndarray, np.ndarray]] = None
        self._distinct: Optional[tuple[np.ndarray, "NeighborIndex"]] = None

    @classmethod
    def from_dataset(cls, data: Dataset, metric: Metric = Metric.EUCLIDEAN_DEGREES) -> "NeighborIndex":
        return cls(data.lat, data.lon, metric)

    def range_query(self, point_index: int, eps: float) -> set[int]:
        if eps <= 0:
            raise ValueError("eps must be positive")
        if not 0 <= point_index < self.n:
            raise IndexError(point_index)
        x = _embed(self.lat[point_index:point_index + 1], self.lon[point_index:point_index + 1], self.metric)[0]
        cand = np.asarray(self._tree.query_ball_point(x, _tree_radius(eps, self.metric)), dtype=np.intp)
        d = pair_distance(self.lat[point_index], self.lon[point_index], self.lat[cand], self.lon[cand], self.metric)
        return set(int(c) for c in cand[d <= eps]) | {point_index}

    def pairs_within(self, eps: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All unordered pairs ``i < j`` with ``d(i, j) <= eps``, sorted by distance.

        The largest radius seen so far is cached; smaller radii are a prefix
        of that sorted list, which is what makes a shrinking-radius sweep cheap.
        """
        if self._pairs is not None and eps <= self._pairs[0]:
            _, i, j, d = self._pairs
            k = int(np.searchsorted(d, eps, side="right"))
            return i[:k], j[:k], d[:k]
        if self.n < 2:
            empty = np.empty(0, dtype=np.intp)
            return empty, empty, np.empty(0)
        cand = self._tree.query_pairs(_tree_radius(eps, self.metric), output_type="ndarray")
        i = cand[:, 0].astype(np.intp)
        j = cand[:, 1].astype(np.intp)
        d = pair_distance(self.lat[i], self.lon[i], self.lat[j], self.lon[j], self.metric)
        keep = d <= eps
        i, j, d = i[keep], j[keep], d[keep]
        order = np.lexsort((j, i, d))
        i, j, d = i[order], j[order], d[order]
        self._pairs = (float(eps), i, j, d)
        return i, j, d

    def neighbor_counts(self, eps: float) -> np.ndarray:
        """``|N(x; eps)|`` for every point, self included."""
        i, j, _ = self.pairs_within(eps)
        return 1 + np.bincount(i, minlength=self.n) + np.bincount(j, minlength=self.n)

    def distinct_locations(self) -> tuple[np.ndarray, "NeighborIndex"]:
        """(inverse map point -> location, index over the distinct locations)."""
        if self._distinct is None:
            coords = np.column_stack([self.lat, self.lon])
            if self.n:
                uniq, inverse = np.unique(coords, axis=0, return_inverse=True)
            else:
                uniq, inverse = coords, np.empty(0, dtype=np.intp)
            self._distinct = (inverse.reshape(-1), NeighborIndex(uniq[:, 0], uniq[:, 1], self.metric))
        return self._distinct


def merge_heights(lat, lon, metric: Metric = Metric.EUCLIDEAN_DEGREES) -> np.ndarray:
    """The n-1 single-linkage merge heights (MST edge weights), unsorted.

    Prim's algorithm over the implicit complete graph: O(n^2) time, O(n) memory.
    """
    metric = Metric(metric)
    lat = np.asarray(lat, dtype=np.float64)
    lon = np.asarray(lon, dtype=np.float64)
    n = lat.size
    if n < 2:
        return np.empty(0)
    rem_lat = lat[1:].copy()
    rem_lon = lon[1:].copy()
    best = np.full(n - 1, np.inf)
    heights = np.empty(n - 1)
    cur_lat, cur_lon = lat[0], lon[0]
    m = n - 1
    for k in range(n - 1):
        d = pair_distance(cur_lat, cur_lon, rem_lat[:m], rem_lon[:m], metric)
        np.minimum(best[:m], d, out=best[:m])
        j = int(np.argmin(best[:m]))
        heights[k] = best[j]
        cur_lat, cur_lon = rem_lat[j], rem_lon[j]
        # swap-remove j; MST weights do not depend on tie order
        m -= 1
        rem_lat[j], rem_lon[j], best[j] = rem_lat[m], rem_lon[m], best[m]
    return heights


def single_linkage_heights(data: Dataset, metric: Metric = Metric.EUCLIDEAN_DEGREES) -> EpsilonSchedule:
    """Distinct positive merge heights, largest first."""
    if data.n < 2:
        raise DegenerateDataset(f"need at least 2 points, got {data.n}")
    heights = merge_heights(data.lat, data.lon, metric)
    heights = np.unique(heights[heights > 0])[::-1]
    return EpsilonSchedule(tuple(float(h) for h in heights))

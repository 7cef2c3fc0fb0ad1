"""Shrinking-radius DBSCAN driven by temporal regularity, and the final region."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from . import contour
from .clustering import DbscanParams, adaptive_min_pts, dbscan, find_major_cluster
from .model import (
    STOP_EXHAUSTED,
    STOP_NO_MAJOR,
    STOP_REGULARITY,
    Dataset,
    DegenerateDataset,
    DelineationResult,
    IterationRecord,
    RegionPolygon,
)
from .spatial import EARTH_RADIUS_M, Metric, NeighborIndex, _embed, _tree_radius, pair_distance, single_linkage_heights
from .temporal import entropy_report, regularity_satisfied

OUTCOME_ACCEPTED = "accepted"
OUTCOME_NO_MAJOR = "stop-no-major"
OUTCOME_REGULARITY = "stop-regularity-violated"


def delineate(data: Dataset, metric: Metric = Metric.EUCLIDEAN_DEGREES, *,
              bin_width: int = 1,
              fixed_delta: Optional[float] = None,
              max_iterations: Optional[int] = None,
              min_pts: Optional[float] = None) -> DelineationResult:
    """Walk the merge-height schedule from the top until a stop condition fires.

    Each radius is accepted while a major cluster exists and every other
    cluster's interval entropy exceeds the major one's by at least delta.
    The result is the last accepted radius with its major cluster; before
    any acceptance that is the top radius with every record.

    ``min_pts`` replaces the adaptive rule with a fixed value and
    ``fixed_delta`` replaces the per-iteration (H_max - H_min) / 2.
    """
    metric = Metric(metric)
    if data.n < 2:
        raise DegenerateDataset(f"need at least 2 records, got {data.n}")
    schedule = single_linkage_heights(data, metric)
    if not schedule:
        raise DegenerateDataset("all records share a single location")
    limit = len(schedule) if max_iterations is None else max(0, min(int(max_iterations), len(schedule)))

    index = NeighborIndex.from_dataset(data, metric)
    eps_star = schedule[0]
    members = np.arange(data.n)
    trace: list[IterationRecord] = []
    stop = STOP_EXHAUSTED

    for i in range(limit):
        eps = schedule[i]
        mp = min_pts if min_pts is not None else adaptive_min_pts(data, eps, metric, index)
        result = dbscan(data, DbscanParams(eps, mp), metric, index)
        major = find_major_cluster(result)
        common = dict(index=i, eps=eps, min_pts=mp, cluster_count=result.cluster_count,
                      cluster_sizes=result.cluster_sizes, noise_size=result.noise_size)
        if major is None:
            trace.append(IterationRecord(**common, entropies=(), delta=None, major_id=None,
                                         outcome=OUTCOME_NO_MAJOR))
            stop = STOP_NO_MAJOR
            break
        report = entropy_report(data, result, bin_width)
        delta = report.delta if fixed_delta is None else float(fixed_delta)
        entropies = tuple(report.per_cluster_entropy[c] for c in range(1, result.cluster_count + 1))
        if not regularity_satisfied(report.per_cluster_entropy, major, delta):
            trace.append(IterationRecord(**common, entropies=entropies, delta=delta, major_id=major,
                                         outcome=OUTCOME_REGULARITY))
            stop = STOP_REGULARITY
            break
        trace.append(IterationRecord(**common, entropies=entropies, delta=delta, major_id=major,
                                     outcome=OUTCOME_ACCEPTED))
        eps_star = eps
        members = result.members(major)

    return DelineationResult(eps_star, tuple(int(m) for m in members), tuple(trace), stop, schedule)


@dataclass(frozen=True)
class Region:
    """Union of closed ``epsilon``-balls around ``centers`` (lat, lon rows)."""

    epsilon: float
    centers: np.ndarray
    metric: Metric = Metric.EUCLIDEAN_DEGREES

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=np.float64).reshape(-1, 2)
        centers.flags.writeable = False
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "metric", Metric(self.metric))
        if centers.shape[0] == 0:
            raise ValueError("region needs at least one center")
        if not self.epsilon > 0:
            raise ValueError("region radius must be positive")

    @classmethod
    def from_result(cls, data: Dataset, result: DelineationResult, metric: Metric = Metric.EUCLIDEAN_DEGREES) -> "Region":
        idx = np.asarray(result.member_indices, dtype=np.intp)
        return cls(result.epsilon_star, np.column_stack([data.lat[idx], data.lon[idx]]), metric)

    @cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(_embed(self.centers[:, 0], self.centers[:, 1], self.metric))

    def contains_many(self, lat, lon) -> np.ndarray:
        lat = np.atleast_1d(np.asarray(lat, dtype=np.float64))
        lon = np.atleast_1d(np.asarray(lon, dtype=np.float64))
        out = np.zeros(lat.shape, dtype=bool)
        if lat.size == 0:
            return out
        dtree, nearest = self._tree.query(_embed(lat, lon, self.metric), k=1)
        c = self.centers[nearest]
        out[:] = pair_distance(lat, lon, c[:, 0], c[:, 1], self.metric) <= self.epsilon
        # the tree's nearest may differ from the exact nearest by rounding near the boundary
        unsure = np.flatnonzero(~out & (dtree <= _tree_radius(self.epsilon, self.metric)))
        for k in unsure:
            cand = self._tree.query_ball_point(_embed(lat[k:k + 1], lon[k:k + 1], self.metric)[0],
                                               _tree_radius(self.epsilon, self.metric))
            cand = np.asarray(cand, dtype=np.intp)
            d = pair_distance(lat[k], lon[k], self.centers[cand, 0], self.centers[cand, 1], self.metric)
            out[k] = bool(np.any(d <= self.epsilon))
        return out

    def bounds(self) -> tuple[float, float, float, float]:
        """(lon_min, lat_min, lon_max, lat_max) of a box enclosing the region."""
        lat_min, lon_min = self.centers.min(axis=0)
        lat_max, lon_max = self.centers.max(axis=0)
        if self.metric is Metric.EUCLIDEAN_DEGREES:
            pad_lat = pad_lon = self.epsilon
        else:
            pad_lat = math.degrees(self.epsilon / EARTH_RADIUS_M)
            edge = max(abs(lat_min), abs(lat_max)) + pad_lat
            pad_lon = 180.0 if edge >= 89.9 else pad_lat / math.cos(math.radians(edge))
        return (max(lon_min - pad_lon, -180.0), max(lat_min - pad_lat, -90.0),
                min(lon_max + pad_lon, 180.0), min(lat_max + pad_lat, 90.0))


def region_contains(region: Region, point, metric: Optional[Metric] = None) -> bool:
    """Closed-ball membership of one point; ``point`` has ``lat``/``lon`` or is (lat, lon)."""
    lat, lon = (point.lat, point.lon) if hasattr(point, "lat") else point
    if metric is not None and Metric(metric) is not region.metric:
        region = Region(region.epsilon, region.centers, metric)
    return bool(region.contains_many(lat, lon)[0])


def export_region(region: Region, grid_resolution: int = 256, label: str = "", refine_steps: int = 30) -> RegionPolygon:
    """Trace the region boundary on a raster and return closed rings.

    Vertices start on crossing grid edges and are bisected toward the true
    boundary, so each lies within one cell of it (usually far closer).
    """
    if grid_resolution < 16:
        raise ValueError("grid_resolution must be at least 16")
    lon0, lat0, lon1, lat1 = region.bounds()
    xs = np.linspace(lon0, lon1, grid_resolution + 1)
    ys = np.linspace(lat0, lat1, grid_resolution + 1)
    dx = xs[1] - xs[0]
    dy = ys[1] - ys[0]
    # one ring of forced-outside nodes so every contour closes
    xs = np.concatenate([[xs[0] - dx], xs, [xs[-1] + dx]])
    ys = np.concatenate([[ys[0] - dy], ys, [ys[-1] + dy]])
    gx, gy = np.meshgrid(xs, ys)
    inside = region.contains_many(gy.ravel(), gx.ravel()).reshape(gy.shape)
    inside[0, :] = inside[-1, :] = inside[:, 0] = inside[:, -1] = False

    def center_inside(r, c):
        return bool(region.contains_many(ys[r] + dy / 2, xs[c] + dx / 2)[0])

    rings = contour.trace_rings(inside, center_inside)
    if not rings:
        return RegionPolygon((), label)

    keys = np.array([k for ring in rings for k in ring], dtype=np.int64)
    r, c, horiz = keys[:, 0], keys[:, 1], keys[:, 2].astype(bool)
    r2 = np.where(horiz, r, r + 1)
    c2 = np.where(horiz, c + 1, c)
    # orient each crossing edge from its inside node to its outside node
    a_in = inside[r, c]
    in_x = np.where(a_in, xs[c], xs[c2])
    in_y = np.where(a_in, ys[r], ys[r2])
    out_x = np.where(a_in, xs[c2], xs[c])
    out_y = np.where(a_in, ys[r2], ys[r])
    for _ in range(refine_steps):
        mx = 0.5 * (in_x + out_x)
        my = 0.5 * (in_y + out_y)
        hit = region.contains_many(my, mx)
        in_x = np.where(hit, mx, in_x)
        in_y = np.where(hit, my, in_y)
        out_x = np.where(hit, out_x, mx)
        out_y = np.where(hit, out_y, my)
    vx = 0.5 * (in_x + out_x)
    vy = 0.5 * (in_y + out_y)

    closed = []
    pos = 0
    for ring in rings:
        m = len(ring)
        xy = np.column_stack([vx[pos:pos + m], vy[pos:pos + m]])
        pos += m
        closed.append(np.vstack([xy, xy[:1]]))
    return _assemble(closed, label)


def _assemble(closed: list[np.ndarray], label: str) -> RegionPolygon:
    from .evaluation import points_in_rings

    areas = [contour.ring_area(xy) for xy in closed]
    shells = [k for k, a in enumerate(areas) if a > 0]
    holes_of: dict[int, list[int]] = {k: [] for k in shells}
    for k, a in enumerate(areas):
        if a >= 0:
            continue
        probe = closed[k][:1]
        owners = [s for s in shells if points_in_rings(probe[:, 1], probe[:, 0], [closed[s]])[0]]
        if owners:
            holes_of[min(owners, key=lambda s: areas[s])].append(k)
    polygons = []
    for s in shells:
        rings = [closed[s]] + [closed[h] for h in holes_of[s]]
        polygons.append(tuple(tuple(map(tuple, ring.tolist())) for ring in rings))
    return RegionPolygon(tuple(polygons), label)


def region_geojson(polygon: RegionPolygon, result: DelineationResult) -> dict:
    return {
        "type": "FeatureCollection",
        "features": [{
            "type": "Feature",
            "properties": {
                "epsilon_star": result.epsilon_star,
                "n_members": len(result.member_indices),
                "stop_reason": result.stop_reason,
                "iterations": result.iterations,
            },
            "geometry": {
                "type": "MultiPolygon",
                "coordinates": [[[list(p) for p in ring] for ring in poly] for poly in polygon.polygons],
            },
        }],
    }


def trace_jsonl(result: DelineationResult) -> str:
    return "".join(json.dumps(rec.to_dict(), sort_keys=True) + "\n" for rec in result.trace)

"""Monte-Carlo precision/recall/F1, synthetic planted datasets, MinPts sweep, timing."""
from __future__ import annotations

import json
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from .delineate import Region, delineate
from .model import Dataset, EvalReport, GeoRecord, RegionError, RegionPolygon, validate_dataset
from .spatial import Metric

BLOCK_SIZE = 8192


class DegenerateRegion(RegionError, ValueError):
    pass


class InvalidSpec(RegionError, ValueError):
    pass


class GeoJSONError(RegionError, ValueError):
    pass


# ---------------------------------------------------------------- geometry

def points_in_rings(lat, lon, rings) -> np.ndarray:
    """Even-odd rule over every ring at once; holes fall out of the parity."""
    lat = np.asarray(lat, dtype=np.float64)
    lon = np.asarray(lon, dtype=np.float64)
    inside = np.zeros(lat.shape, dtype=bool)
    for ring in rings:
        xy = np.asarray(ring, dtype=np.float64)
        x1, y1 = xy[:-1, 0], xy[:-1, 1]
        x2, y2 = xy[1:, 0], xy[1:, 1]
        box = ((lon >= xy[:, 0].min()) & (lon <= xy[:, 0].max())
               & (lat >= xy[:, 1].min()) & (lat <= xy[:, 1].max()))
        sel = np.flatnonzero(box)
        if sel.size == 0:
            continue
        px, py = lon[sel], lat[sel]
        flip = np.zeros(sel.size, dtype=bool)
        for k in range(x1.size):
            if y1[k] == y2[k]:
                continue
            crosses = (y1[k] > py) != (y2[k] > py)
            x_at = x1[k] + (py - y1[k]) * (x2[k] - x1[k]) / (y2[k] - y1[k])
            flip ^= crosses & (px < x_at)
        inside[sel] ^= flip
    return inside


def polygon_contains(polygon: RegionPolygon, lat, lon) -> np.ndarray:
    return points_in_rings(lat, lon, polygon.rings)


def polygon_area(polygon: RegionPolygon) -> float:
    """Planar area in square degrees (holes subtracted)."""
    total = 0.0
    for poly in polygon.polygons:
        for k, ring in enumerate(poly):
            xy = np.asarray(ring)
            a = abs(0.5 * float(np.sum(xy[:-1, 0] * xy[1:, 1] - xy[1:, 0] * xy[:-1, 1])))
            total += a if k == 0 else -a
    return total


def disk_polygon(lat: float, lon: float, radius: float, vertices: int = 256, label: str = "") -> RegionPolygon:
    """Regular polygon approximating a disk of ``radius`` degrees (vertices on the circle)."""
    t = np.linspace(0.0, 2.0 * math.pi, vertices, endpoint=False)
    ring = [(lon + radius * math.cos(a), lat + radius * math.sin(a)) for a in t]
    ring.append(ring[0])
    return RegionPolygon(((tuple(ring),),), label)


def box_polygon(lat_min: float, lat_max: float, lon_min: float, lon_max: float, label: str = "") -> RegionPolygon:
    ring = ((lon_min, lat_min), (lon_max, lat_min), (lon_max, lat_max), (lon_min, lat_max), (lon_min, lat_min))
    return RegionPolygon(((ring,),), label)


Shape = Union[Region, RegionPolygon]


def _contains(shape: Shape, lat, lon) -> np.ndarray:
    if isinstance(shape, Region):
        return shape.contains_many(lat, lon)
    return polygon_contains(shape, lat, lon)


def _bounds(shape: Shape) -> tuple[float, float, float, float]:
    return shape.bounds()


# ---------------------------------------------------------------- GeoJSON

def read_polygon_geojson(path, label: str = "") -> RegionPolygon:
    """Load Polygon/MultiPolygon geometry from a geometry, Feature or FeatureCollection."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GeoJSONError(f"{path}: not valid JSON ({exc})") from exc
    return polygon_from_geojson(doc, label)


def polygon_from_geojson(doc: dict, label: str = "") -> RegionPolygon:
    def geometries(obj):
        if not isinstance(obj, dict) or "type" not in obj:
            raise GeoJSONError("GeoJSON object without a type")
        kind = obj["type"]
        if kind == "FeatureCollection":
            for feat in obj.get("features", []):
                yield from geometries(feat)
        elif kind == "Feature":
            if obj.get("geometry") is not None:
                yield from geometries(obj["geometry"])
        elif kind in ("Polygon", "MultiPolygon"):
            yield obj
        else:
            raise GeoJSONError(f"unsupported GeoJSON type {kind!r}")

    polygons = []
    try:
        for geom in geometries(doc):
            coords = geom["coordinates"]
            polys = [coords] if geom["type"] == "Polygon" else coords
            for poly in polys:
                polygons.append(tuple(tuple((float(p[0]), float(p[1])) for p in ring) for ring in poly))
        polygon = RegionPolygon(tuple(polygons), label)
    except GeoJSONError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise GeoJSONError(f"malformed polygon geometry: {exc}") from exc
    if not polygon.polygons:
        raise GeoJSONError("no polygon geometry found")
    return polygon


def polygon_geojson(polygon: RegionPolygon, properties: Optional[dict] = None) -> dict:
    return {
        "type": "FeatureCollection",
        "features": [{
            "type": "Feature",
            "properties": dict(properties or {}, label=polygon.label),
            "geometry": {
                "type": "MultiPolygon",
                "coordinates": [[[list(p) for p in ring] for ring in poly] for poly in polygon.polygons],
            },
        }],
    }


# ---------------------------------------------------------------- scoring

@dataclass(frozen=True)
class MonteCarloConfig:
    samples: int = 100_000
    rng_seed: int = 0
    pad_fraction: float = 0.01
    threads: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be a nonnegative 64-bit integer")


def f1_score(prec: float, rec: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if prec + rec == 0:
        return 0.0
    return 2.0 * prec * rec / (prec + rec)


def sampling_domain(truth: Shape, estimate: Shape, pad_fraction: float = 0.01) -> tuple[float, float, float, float]:
    a, b = _bounds(truth), _bounds(estimate)
    x0, y0 = min(a[0], b[0]), min(a[1], b[1])
    x1, y1 = max(a[2], b[2]), max(a[3], b[3])
    px, py = (x1 - x0) * pad_fraction, (y1 - y0) * pad_fraction
    return x0 - px, y0 - py, x1 + px, y1 + py


def _sample_block(seed: int, block: int, count: int, domain) -> tuple[np.ndarray, np.ndarray]:
    # one stream per (seed, block): the draw for a sample depends only on its position
    rng = np.random.default_rng([seed, block])
    u = rng.random((count, 2))
    x0, y0, x1, y1 = domain
    return y0 + (y1 - y0) * u[:, 1], x0 + (x1 - x0) * u[:, 0]


def monte_carlo_eval(truth: Shape, estimate: Shape, cfg: MonteCarloConfig = MonteCarloConfig()) -> EvalReport:
    if isinstance(truth, RegionPolygon) and (not truth.polygons or polygon_area(truth) <= 0):
        raise DegenerateRegion("ground-truth polygon has no area")
    if isinstance(estimate, RegionPolygon) and (not estimate.polygons or polygon_area(estimate) <= 0):
        raise DegenerateRegion("estimated polygon has no area")
    domain = sampling_domain(truth, estimate, cfg.pad_fraction)
    if not (domain[2] > domain[0] and domain[3] > domain[1]):
        raise DegenerateRegion("sampling domain has zero area")

    blocks = [(b, min(BLOCK_SIZE, cfg.samples - b * BLOCK_SIZE))
              for b in range(math.ceil(cfg.samples / BLOCK_SIZE))]

    def run(block):
        b, count = block
        lat, lon = _sample_block(cfg.rng_seed, b, count, domain)
        in_r = _contains(truth, lat, lon)
        in_e = _contains(estimate, lat, lon)
        return int(in_r.sum()), int(in_e.sum()), int((in_r & in_e).sum())

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    n_r = sum(p[0] for p in parts)
    n_e = sum(p[1] for p in parts)
    both = sum(p[2] for p in parts)
    prec = both / n_e if n_e else 0.0
    rec = both / n_r if n_r else 0.0
    return EvalReport(prec, rec, f1_score(prec, rec), cfg.samples, n_r, n_e, both, cfg.rng_seed)


# ---------------------------------------------------------------- synthetic data

@dataclass(frozen=True)
class SyntheticSpec:
    """A planted region with periodic posting plus randomly timed distractors.

    Decoy blobs are Gaussian with ``decoy_sigma`` degrees; when
    ``decoy_centers`` is empty they are drawn inside ``box`` at least
    ``decoy_clearance`` from the planted region and from each other.
    ``box`` is (lat_min, lat_max, lon_min, lon_max); by default the planted
    bounds widened by ``box_margin`` times their larger side on every side.
    """

    planted_region: RegionPolygon
    in_region_count: int = 1000
    decoy_cluster_count: int = 3
    decoy_points_per_cluster: int = 200
    scatter_noise_count: int = 200
    period: int = 20
    jitter: int = 1
    start_time: int = 1_464_768_000  # 2016-06-01T08:00:00Z, inside the default day window
    decoy_sigma: float = 0.7
    decoy_centers: tuple[tuple[float, float], ...] = ()
    decoy_clearance: Optional[float] = None
    box: Optional[tuple[float, float, float, float]] = None
    box_margin: float = 2.5
    keyword: str = "planted"
    rng_seed: int = 0

    def __post_init__(self):
        counts = (self.in_region_count, self.decoy_cluster_count, self.decoy_points_per_cluster,
                  self.scatter_noise_count)
        if any(int(c) != c or c < 0 for c in counts):
            raise InvalidSpec("counts must be nonnegative integers")
        if not (self.period > 0 and 0 <= self.jitter < self.period):
            raise InvalidSpec("need period > 0 and 0 <= jitter < period")
        if self.decoy_sigma <= 0:
            raise InvalidSpec("decoy_sigma must be positive")
        if self.decoy_centers and len(self.decoy_centers) != self.decoy_cluster_count:
            raise InvalidSpec("decoy_centers must list one center per decoy cluster")
        if not self.planted_region.polygons:
            raise InvalidSpec("planted region is empty")

    @property
    def total(self) -> int:
        return self.in_region_count + self.decoy_cluster_count * self.decoy_points_per_cluster + self.scatter_noise_count

    def enclosing_box(self) -> tuple[float, float, float, float]:
        if self.box is not None:
            return self.box
        x0, y0, x1, y1 = self.planted_region.bounds()
        m = self.box_margin * max(x1 - x0, y1 - y0)
        return (max(y0 - m, -90.0), min(y1 + m, 90.0), max(x0 - m, -180.0), min(x1 + m, 180.0))


def _distance_to_rings(lat: float, lon: float, rings) -> float:
    best = math.inf
    for ring in rings:
        xy = np.asarray(ring)
        a, b = xy[:-1], xy[1:]
        ab = b - a
        ap = np.array([lon, lat]) - a
        t = np.clip(np.sum(ap * ab, axis=1) / np.maximum(np.sum(ab * ab, axis=1), 1e-300), 0.0, 1.0)
        d = np.hypot(*(a + t[:, None] * ab - np.array([lon, lat])).T)
        best = min(best, float(d.min()))
    return best


def generate_synthetic(spec: SyntheticSpec) -> tuple[Dataset, RegionPolygon]:
    rng = np.random.default_rng(spec.rng_seed)
    region = spec.planted_region
    lat_min, lat_max, lon_min, lon_max = spec.enclosing_box()
    x0, y0, x1, y1 = region.bounds()
    window = max(spec.in_region_count, 1) * spec.period
    records: list[GeoRecord] = []

    # planted points: uniform inside the polygon, periodic timestamps
    lat_in = np.empty(0)
    lon_in = np.empty(0)
    while lat_in.size < spec.in_region_count:
        need = spec.in_region_count - lat_in.size
        la = rng.uniform(y0, y1, 2 * need + 16)
        lo = rng.uniform(x0, x1, 2 * need + 16)
        ok = polygon_contains(region, la, lo)
        lat_in = np.concatenate([lat_in, la[ok]])[:spec.in_region_count]
        lon_in = np.concatenate([lon_in, lo[ok]])[:spec.in_region_count]
    k = np.arange(spec.in_region_count)
    jit = rng.integers(-spec.jitter, spec.jitter + 1, spec.in_region_count)
    t_in = spec.start_time + k * spec.period + jit
    for la, lo, t in zip(lat_in, lon_in, t_in):
        records.append(GeoRecord(float(la), float(lo), int(t), f"{spec.keyword} resident"))

    # decoy blobs: gaussian around centers outside the region, uniform times
    clearance = spec.decoy_clearance if spec.decoy_clearance is not None else 3.0 * spec.decoy_sigma
    centers = list(spec.decoy_centers)
    attempts = 0
    while len(centers) < spec.decoy_cluster_count:
        attempts += 1
        if attempts > 100_000:
            raise InvalidSpec("could not place decoy centers with the requested clearance")
        la, lo = rng.uniform(lat_min, lat_max), rng.uniform(lon_min, lon_max)
        if polygon_contains(region, [la], [lo])[0] or _distance_to_rings(la, lo, region.rings) < clearance:
            continue
        if any(math.hypot(la - c[0], lo - c[1]) < 2 * clearance for c in centers):
            continue
        centers.append((la, lo))
    for c_lat, c_lon in centers:
        m = spec.decoy_points_per_cluster
        la = np.clip(rng.normal(c_lat, spec.decoy_sigma, m), -90.0, 90.0)
        lo = np.clip(rng.normal(c_lon, spec.decoy_sigma, m), -180.0, 180.0)
        ts = rng.integers(spec.start_time, spec.start_time + window, m)
        for a, b, t in zip(la, lo, ts):
            records.append(GeoRecord(float(a), float(b), int(t), f"visiting {spec.keyword}"))

    # scatter noise over the whole box
    m = spec.scatter_noise_count
    la = rng.uniform(lat_min, lat_max, m)
    lo = rng.uniform(lon_min, lon_max, m)
    ts = rng.integers(spec.start_time, spec.start_time + window, m)
    for a, b, t in zip(la, lo, ts):
        records.append(GeoRecord(float(a), float(b), int(t), f"{spec.keyword} mentioned"))
    return validate_dataset(records), region


def scale_spec(spec: SyntheticSpec, n: int, fixed_density: bool = True) -> SyntheticSpec:
    """Resize a template to about ``n`` points, optionally stretching space to keep density."""
    f = n / spec.total
    in_count = int(round(spec.in_region_count * f))
    per_decoy = int(round(spec.decoy_points_per_cluster * f))
    scatter = max(0, n - in_count - per_decoy * spec.decoy_cluster_count)
    out = replace(spec, in_region_count=in_count, decoy_points_per_cluster=per_decoy,
                  scatter_noise_count=scatter)
    if not fixed_density:
        return out
    s = math.sqrt(f)
    x0, y0, x1, y1 = spec.planted_region.bounds()
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2

    def sx(x):
        return cx + (x - cx) * s

    def sy(y):
        return cy + (y - cy) * s

    polys = tuple(tuple(tuple((sx(x), sy(y)) for x, y in ring) for ring in poly)
                  for poly in spec.planted_region.polygons)
    box = None
    if spec.box is not None:
        a, b, c, d = spec.box
        box = (sy(a), sy(b), sx(c), sx(d))
    return replace(out, planted_region=RegionPolygon(polys, spec.planted_region.label),
                   decoy_sigma=spec.decoy_sigma * s,
                   decoy_centers=tuple((sy(a), sx(b)) for a, b in spec.decoy_centers),
                   decoy_clearance=None if spec.decoy_clearance is None else spec.decoy_clearance * s,
                   box=box)


# ---------------------------------------------------------------- experiments

@dataclass(frozen=True)
class SweepResult:
    rows: tuple[tuple[float, float], ...]  # (min_pts, f1), sorted by min_pts
    adaptive_f1: float

    @property
    def best_f1(self) -> float:
        return max(f for _, f in self.rows)

    def to_csv(self) -> str:
        lines = ["min_pts,f1"]
        lines += [f"{m!r},{f!r}" for m, f in self.rows]
        lines.append(f"adaptive,{self.adaptive_f1!r}")
        return "\n".join(lines) + "\n"


def minpts_sweep(data: Dataset, truth: RegionPolygon, metric: Metric = Metric.EUCLIDEAN_DEGREES,
                 candidates: Sequence[float] = tuple(range(1, 21)),
                 cfg: MonteCarloConfig = MonteCarloConfig(), bin_width: int = 1) -> SweepResult:
    """F1 of fixed-MinPts runs against the adaptive run, on one dataset."""
    candidates = sorted(set(float(c) for c in candidates))
    if not candidates:
        raise InvalidSpec("candidate list is empty")

    def score(min_pts):
        result = delineate(data, metric, bin_width=bin_width, min_pts=min_pts)
        return monte_carlo_eval(truth, Region.from_result(data, result, metric), cfg).f1

    rows = tuple((c, score(c)) for c in candidates)
    return SweepResult(rows, score(None))


def scaling_benchmark(template: SyntheticSpec, sizes: Sequence[int], repeats: int = 3,
                      metric: Metric = Metric.EUCLIDEAN_DEGREES, fixed_density: bool = True,
                      clock=time.perf_counter) -> list[tuple[int, float]]:
    """Median wall time of a full delineation per dataset size."""
    sizes = list(sizes)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InvalidSpec("sizes must be increasing")
    if any(s < 100 for s in sizes):
        raise InvalidSpec("sizes must be at least 100")
    rows = []
    for n in sizes:
        data, _ = generate_synthetic(scale_spec(template, n, fixed_density))
        times = []
        for _ in range(repeats):
            t0 = clock()
            delineate(data, metric)
            times.append(clock() - t0)
        rows.append((n, statistics.median(times)))
    return rows


def loglog_slope(rows: Sequence[tuple[int, float]]) -> float:
    x = np.log([r[0] for r in rows])
    y = np.log([r[1] for r in rows])
    return float(np.polyfit(x, y, 1)[0])

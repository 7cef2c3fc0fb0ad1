import json
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import make_dataset
from vagueregion.delineate import Region, delineate
from vagueregion.evaluation import (
    DegenerateRegion,
    GeoJSONError,
    InvalidSpec,
    MonteCarloConfig,
    SyntheticSpec,
    box_polygon,
    disk_polygon,
    f1_score,
    generate_synthetic,
    loglog_slope,
    minpts_sweep,
    monte_carlo_eval,
    points_in_rings,
    polygon_area,
    polygon_contains,
    polygon_from_geojson,
    polygon_geojson,
    read_polygon_geojson,
    scale_spec,
    scaling_benchmark,
)
from vagueregion.model import RegionPolygon
from vagueregion.temporal import IntervalSeries, shannon_entropy

DISK = disk_polygon(52.5, -1.5, 1.0)


def small_spec(**kw):
    base = dict(in_region_count=200, decoy_cluster_count=2, decoy_points_per_cluster=40, scatter_noise_count=40)
    base.update(kw)
    return SyntheticSpec(DISK, **base)


# ---- F1


def test_f1_examples():
    assert f1_score(0.95, 0.71) == pytest.approx(0.8127, abs=1e-4)
    assert round(f1_score(0.95, 0.71), 2) == 0.81
    assert f1_score(1, 1) == 1
    assert f1_score(0, 0.4) == 0 and f1_score(0, 0) == 0


unit = st.floats(0, 1)


@given(unit, unit)
def test_f1_harmonic_mean(p, r):
    f = f1_score(p, r)
    assert f == f1_score(r, p)
    if p + r > 0:
        assert f == pytest.approx(1 / ((1 / p + 1 / r) / 2) if p and r else 0.0, abs=1e-12)
        assert f <= (p + r) / 2 + 1e-15


# ---- point in polygon


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=3, max_size=12),
       st.lists(st.tuples(st.floats(-6, 6), st.floats(-6, 6)), min_size=1, max_size=40))
def test_even_odd_matches_scalar(verts, probes):
    ring = list(verts) + [verts[0]]
    got = points_in_rings([p[1] for p in probes], [p[0] for p in probes], [ring])
    want = [oracles.point_in_ring(x, y, ring) for x, y in probes]
    assert list(got) == want


def test_hole_excluded():
    outer = ((0, 0), (4, 0), (4, 4), (0, 4), (0, 0))
    hole = ((1, 1), (1, 3), (3, 3), (3, 1), (1, 1))
    poly = RegionPolygon(((outer, hole),))
    assert list(polygon_contains(poly, [0.5, 2.0], [0.5, 2.0])) == [True, False]
    assert polygon_area(poly) == pytest.approx(12.0)


# ---- Monte Carlo


def test_identical_regions():
    rep = monte_carlo_eval(DISK, DISK, MonteCarloConfig(100_000, 1))
    assert rep.precision == 1.0 and rep.recall == 1.0 and rep.f1 == 1.0


def test_region_against_its_polygon():
    region = Region(1.0, [(52.5, -1.5)])
    rep = monte_carlo_eval(DISK, region, MonteCarloConfig(100_000, 2))
    p = rep.samples_in_both / rep.samples_in_R
    sigma = math.sqrt(max(p * (1 - p), 1e-4) / rep.samples_in_R)
    assert abs(rep.precision - 1) <= 3 * sigma + 2e-4
    assert abs(rep.recall - 1) <= 3 * sigma + 2e-4


def test_disjoint_regions():
    rep = monte_carlo_eval(box_polygon(0, 1, 0, 1), box_polygon(2, 3, 2, 3), MonteCarloConfig(20_000, 3))
    assert rep.precision == rep.recall == rep.f1 == 0.0


def test_half_square():
    truth = box_polygon(0, 2, 0, 2)
    est = box_polygon(0, 2, 1, 2)
    rep = monte_carlo_eval(truth, est, MonteCarloConfig(100_000, 4))
    assert rep.recall == pytest.approx(0.5, abs=0.01)
    assert rep.precision == pytest.approx(1.0, abs=1e-12)
    assert rep.samples_in_both <= min(rep.samples_in_R, rep.samples_in_Rhat)


def test_convergence_with_sample_count():
    truth = DISK
    est = Region(1.0, [(52.5, -1.5)])
    errs = []
    for n in (1_000, 100_000):
        rep = monte_carlo_eval(truth, est, MonteCarloConfig(n, 9))
        errs.append(abs(rep.precision - 1) + abs(rep.recall - 1))
    small = monte_carlo_eval(box_polygon(0, 2, 0, 2), box_polygon(0, 2, 1, 2), MonteCarloConfig(1_000, 9))
    large = monte_carlo_eval(box_polygon(0, 2, 0, 2), box_polygon(0, 2, 1, 2), MonteCarloConfig(100_000, 9))
    assert abs(large.recall - 0.5) <= max(abs(small.recall - 0.5), 0.005)
    assert errs[1] <= errs[0] + 1e-3


def test_swapping_swaps_precision_and_recall():
    a = box_polygon(0, 2, 0, 2)
    b = box_polygon(1, 3, 0.5, 2.5)
    cfg = MonteCarloConfig(50_000, 5)
    ab, ba = monte_carlo_eval(a, b, cfg), monte_carlo_eval(b, a, cfg)
    assert (ab.precision, ab.recall) == (ba.recall, ba.precision)


def test_threads_do_not_change_counts():
    region = Region(0.4, [(52.0, -1.0), (52.3, -1.4)])
    one = monte_carlo_eval(DISK, region, MonteCarloConfig(50_000, 6, threads=1))
    four = monte_carlo_eval(DISK, region, MonteCarloConfig(50_000, 6, threads=4))
    assert one == four


def test_degenerate_polygon():
    flat = RegionPolygon(((((0, 0), (1, 0), (2, 0), (0, 0)),),))
    with pytest.raises(DegenerateRegion):
        monte_carlo_eval(flat, DISK)


def test_config_validation():
    with pytest.raises(ValueError):
        MonteCarloConfig(samples=0)
    with pytest.raises(ValueError):
        MonteCarloConfig(rng_seed=-1)


# ---- GeoJSON


def test_geojson_round_trip(tmp_path):
    p = tmp_path / "d.geojson"
    p.write_text(json.dumps(polygon_geojson(DISK)))
    assert read_polygon_geojson(p).polygons == DISK.polygons


def test_geojson_plain_polygon():
    doc = {"type": "Polygon", "coordinates": [[[0, 0], [1, 0], [1, 1], [0, 0]]]}
    assert polygon_from_geojson(doc).polygons == (((((0, 0), (1, 0), (1, 1), (0, 0))),),)


@pytest.mark.parametrize("doc", [
    {"type": "Point", "coordinates": [0, 0]},
    {"type": "Polygon"},
    {"type": "Polygon", "coordinates": [[[0, 0], [1, 0], [1, 1]]]},
    {"type": "FeatureCollection", "features": []},
    {"coordinates": []},
])
def test_geojson_rejects_malformed(doc):
    with pytest.raises(GeoJSONError):
        polygon_from_geojson(doc)


def test_geojson_not_json(tmp_path):
    p = tmp_path / "bad.geojson"
    p.write_text("{not json")
    with pytest.raises(GeoJSONError):
        read_polygon_geojson(p)


# ---- synthetic data


def test_synthetic_without_distractors_is_all_inside():
    data, truth = generate_synthetic(small_spec(decoy_cluster_count=0, scatter_noise_count=0))
    assert data.n == 200
    assert polygon_contains(truth, data.lat, data.lon).all()


def test_synthetic_is_seed_deterministic():
    a, _ = generate_synthetic(small_spec(rng_seed=7))
    b, _ = generate_synthetic(small_spec(rng_seed=7))
    c, _ = generate_synthetic(small_spec(rng_seed=8))
    assert a == b and a != c


def test_planted_points_inside_and_periodic():
    spec = small_spec(jitter=0, rng_seed=3)
    data, truth = generate_synthetic(spec)
    planted = [i for i, r in enumerate(data.records) if r.text.endswith("resident")]
    assert len(planted) == spec.in_region_count
    assert polygon_contains(truth, data.lat[planted], data.lon[planted]).all()
    intervals = tuple(np.diff(data.timestamps[planted]).tolist())
    assert set(intervals) == {spec.period}
    assert shannon_entropy(IntervalSeries(intervals)) == 0.0


def test_decoys_stay_outside_planted_region():
    data, truth = generate_synthetic(small_spec(rng_seed=4, scatter_noise_count=0))
    decoys = [i for i, r in enumerate(data.records) if r.text.startswith("visiting")]
    inside = polygon_contains(truth, data.lat[decoys], data.lon[decoys])
    assert inside.mean() < 0.05


@pytest.mark.parametrize("kw", [dict(in_region_count=-1), dict(jitter=20), dict(period=0),
                                dict(decoy_sigma=0), dict(decoy_centers=((0, 0),))])
def test_invalid_specs(kw):
    with pytest.raises(InvalidSpec):
        small_spec(**kw)


def test_scale_spec_counts_and_density():
    spec = SyntheticSpec(DISK)
    big = scale_spec(spec, 3600)
    assert big.total == 3600
    assert polygon_area(big.planted_region) == pytest.approx(2 * polygon_area(DISK), rel=1e-9)
    assert scale_spec(spec, 900, fixed_density=False).planted_region == DISK


# ---- experiments


def test_sweep_single_candidate_equal_to_adaptive():
    # 3x3 unit grid: the only radius is 1 and the adaptive MinPts there is 33/9
    pts = [(float(i), float(j)) for i in range(3) for j in range(3)]
    data = make_dataset(pts, [10 * k for k in range(9)])
    truth = box_polygon(-0.5, 2.5, -0.5, 2.5)
    res = minpts_sweep(data, truth, candidates=[33 / 9], cfg=MonteCarloConfig(20_000, 1))
    assert res.rows[0][1] == res.adaptive_f1


def test_sweep_rows_sorted_and_csv():
    data, truth = generate_synthetic(small_spec(rng_seed=2))
    res = minpts_sweep(data, truth, candidates=[5, 2, 3], cfg=MonteCarloConfig(5_000, 1))
    assert [m for m, _ in res.rows] == [2.0, 3.0, 5.0]
    lines = res.to_csv().splitlines()
    assert lines[0] == "min_pts,f1" and lines[-1].startswith("adaptive,")
    with pytest.raises(InvalidSpec):
        minpts_sweep(data, truth, candidates=[])


def test_benchmark_rows_and_median():
    ticks = iter(range(1000))

    def clock():
        return float(next(ticks)) ** 2

    rows = scaling_benchmark(small_spec(), [100, 200], repeats=3, clock=clock)
    assert [n for n, _ in rows] == [100, 200]
    # squared tick differences 1, 5, 9 then 13, 17, 21: medians 5 and 17
    assert [t for _, t in rows] == [5.0, 17.0]
    with pytest.raises(InvalidSpec):
        scaling_benchmark(small_spec(), [200, 100])
    with pytest.raises(InvalidSpec):
        scaling_benchmark(small_spec(), [50])


def test_loglog_slope():
    rows = [(n, 3e-7 * n ** 2) for n in (500, 1000, 2000)]
    assert loglog_slope(rows) == pytest.approx(2.0, abs=1e-9)


def test_synthetic_delineation_small():
    data, truth = generate_synthetic(replace(small_spec(rng_seed=1), decoy_cluster_count=0))
    res = delineate(data)
    rep = monte_carlo_eval(truth, Region.from_result(data, res), MonteCarloConfig(20_000, 1))
    assert rep.f1 > 0.7

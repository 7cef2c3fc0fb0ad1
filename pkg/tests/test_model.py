import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vagueregion.model import (
    ClusterResult,
    Dataset,
    EpsilonSchedule,
    GeoRecord,
    InvalidCoordinate,
    InvalidTimestamp,
    RegionPolygon,
    validate_dataset,
)

records = st.builds(
    GeoRecord,
    st.floats(-90, 90, allow_nan=False),
    st.floats(-180, 180, allow_nan=False),
    st.integers(0, 2**40),
    st.text(max_size=5),
)


def test_empty_input_gives_empty_dataset():
    data = validate_dataset([])
    assert data.n == 0
    assert data.lat.shape == (0,)


def test_records_sorted_by_timestamp():
    data = validate_dataset([GeoRecord(1, 1, 100), GeoRecord(2, 2, 50)])
    assert [r.timestamp for r in data.records] == [50, 100]


@pytest.mark.parametrize("lat,lon", [(91, 0), (-90.5, 0), (0, 180.01), (float("nan"), 0)])
def test_out_of_range_coordinates_rejected(lat, lon):
    with pytest.raises(InvalidCoordinate):
        GeoRecord(lat, lon, 0)


def test_negative_or_fractional_timestamp_rejected():
    with pytest.raises(InvalidTimestamp):
        GeoRecord(0, 0, -1)
    with pytest.raises(InvalidTimestamp):
        GeoRecord(0, 0, 1.5)


def test_duplicates_survive():
    r = GeoRecord(1, 2, 3, "a")
    assert validate_dataset([r, r, r]).n == 3


def test_arrays_are_read_only():
    data = validate_dataset([GeoRecord(1, 2, 3)])
    with pytest.raises(ValueError):
        data.lat[0] = 5


def test_cluster_result_accounting():
    res = ClusterResult(np.array([1, 1, -1, 2, 1]), np.array([True, True, False, True, False]))
    assert res.cluster_count == 2
    assert res.cluster_sizes == (3, 1)
    assert res.noise_size == 1
    assert list(res.members(1)) == [0, 1, 4]


def test_schedule_must_strictly_decrease():
    EpsilonSchedule((3.0, 2.0, 1.0))
    with pytest.raises(ValueError):
        EpsilonSchedule((1.0, 1.0))
    with pytest.raises(ValueError):
        EpsilonSchedule((1.0, 0.0))


def test_polygon_rings_must_close():
    with pytest.raises(ValueError):
        RegionPolygon(((((0, 0), (1, 0), (1, 1), (0, 1)),),))
    poly = RegionPolygon(((((0, 0), (1, 0), (1, 1), (0, 0)),),))
    assert poly.bounds() == (0, 0, 1, 1)


@given(st.lists(records, max_size=30))
def test_validation_is_idempotent(recs):
    once = validate_dataset(recs)
    assert validate_dataset(once.records) == once


@given(st.lists(records, max_size=30), st.randoms())
def test_order_ignores_insertion_order(recs, rnd):
    shuffled = list(recs)
    rnd.shuffle(shuffled)
    assert validate_dataset(shuffled).records == validate_dataset(recs).records


@given(st.lists(records, max_size=30))
def test_dataset_is_chronological(recs):
    ts = [r.timestamp for r in validate_dataset(recs).records]
    assert ts == sorted(ts)


def test_dataset_constructor_keeps_given_records():
    recs = (GeoRecord(0, 0, 5), GeoRecord(0, 0, 1))
    assert Dataset(recs).n == 2

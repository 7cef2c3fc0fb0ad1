"""Delineating imprecise regions from geo-tagged, time-stamped records."""
from .clustering import DbscanParams, adaptive_min_pts, dbscan, find_major_cluster
from .delineate import Region, delineate, export_region, region_contains
from .evaluation import (
    MonteCarloConfig,
    SyntheticSpec,
    f1_score,
    generate_synthetic,
    minpts_sweep,
    monte_carlo_eval,
    scaling_benchmark,
)
from .model import (
    NOISE,
    ClusterResult,
    Dataset,
    DelineationResult,
    EpsilonSchedule,
    EvalReport,
    GeoRecord,
    RegionPolygon,
    validate_dataset,
)
from .spatial import Metric, NeighborIndex, distance, single_linkage_heights
from .temporal import IntervalSeries, compute_delta, interval_series, regularity_satisfied, shannon_entropy

__version__ = "0.1.0"

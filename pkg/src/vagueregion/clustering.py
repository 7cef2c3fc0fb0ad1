"""DBSCAN with closed-ball neighborhoods, adaptive MinPts, major cluster."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .model import NOISE, ClusterResult, Dataset, EmptyDataset
from .spatial import Metric, NeighborIndex


@dataclass(frozen=True)
class DbscanParams:
    eps: float
    min_pts: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not self.min_pts >= 1:
            raise ValueError(f"min_pts must be >= 1, got {self.min_pts}")


def _index_for(data: Dataset, metric: Metric, index: Optional[NeighborIndex]) -> NeighborIndex:
    if index is None:
        return NeighborIndex.from_dataset(data, metric)
    if index.n != data.n or index.metric is not Metric(metric):
        raise ValueError("neighbor index does not match dataset/metric")
    return index


def adaptive_min_pts(data: Dataset, eps: float, metric: Metric = Metric.EUCLIDEAN_DEGREES,
                     index: Optional[NeighborIndex] = None) -> float:
    """Mean number of distinct locations inside each point's eps-ball.

    Points stacked on one location count once toward a neighbor's tally, and
    a point's own location always counts.
    """
    if data.n == 0:
        raise EmptyDataset("adaptive MinPts needs at least one point")
    if not eps > 0:
        raise ValueError("eps must be positive")
    index = _index_for(data, metric, index)
    inverse, loc_index = index.distinct_locations()
    per_location = loc_index.neighbor_counts(eps)
    return float(per_location[inverse].sum()) / data.n


def dbscan(data: Dataset, params: DbscanParams, metric: Metric = Metric.EUCLIDEAN_DEGREES,
           index: Optional[NeighborIndex] = None) -> ClusterResult:
    """Density-based clustering with deterministic labelling.

    A border point reachable from several clusters joins the cluster of its
    lowest-index core neighbor. Cluster ids follow the smallest member index.
    """
    n = data.n
    if n == 0:
        return ClusterResult(np.empty(0, dtype=np.int64), np.empty(0, dtype=bool))
    index = _index_for(data, metric, index)
    i, j, _ = index.pairs_within(params.eps)
    counts = 1 + np.bincount(i, minlength=n) + np.bincount(j, minlength=n)
    core = counts >= params.min_pts

    both = core[i] & core[j]
    graph = coo_matrix((np.ones(int(both.sum()), dtype=np.int8), (i[both], j[both])), shape=(n, n))
    _, comp = connected_components(graph.tocsr(), directed=False)

    raw = np.full(n, NOISE, dtype=np.int64)
    raw[core] = comp[core]

    # border points: claimed by their smallest-index core neighbor
    claim = np.full(n, n, dtype=np.int64)
    a = core[i] & ~core[j]
    np.minimum.at(claim, j[a], i[a])
    b = core[j] & ~core[i]
    np.minimum.at(claim, i[b], j[b])
    border = claim < n
    raw[border] = comp[claim[border]]

    labels = np.full(n, NOISE, dtype=np.int64)
    members = np.flatnonzero(raw != NOISE)
    if members.size:
        comp_ids, first = np.unique(raw[members], return_index=True)
        rank = np.empty(comp_ids.size, dtype=np.int64)
        rank[np.argsort(members[first], kind="stable")] = np.arange(1, comp_ids.size + 1)
        labels[members] = rank[np.searchsorted(comp_ids, raw[members])]
    return ClusterResult(labels, core)


def find_major_cluster(result: ClusterResult) -> Optional[int]:
    """Id of the cluster strictly larger than every other cluster and the noise set."""
    sizes = result.cluster_sizes
    if not sizes:
        return None
    top = max(sizes)
    if sizes.count(top) > 1 or top <= result.noise_size:
        return None
    return sizes.index(top) + 1

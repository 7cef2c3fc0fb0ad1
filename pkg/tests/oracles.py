"""Brute-force reference implementations used only by the tests.

Deliberately naive and scalar: no numpy, no spatial index, no shared code
with the package beyond the input types.
"""
from __future__ import annotations

import math
from collections import Counter


def euclid(p, q):
    dy = p[0] - q[0]
    dx = p[1] - q[1]
    return math.sqrt(dy * dy + dx * dx)


def haversine_m(p, q, radius=6_371_000.0):
    la1, lo1, la2, lo2 = map(math.radians, (p[0], p[1], q[0], q[1]))
    h = math.sin((la2 - la1) / 2) ** 2 + math.cos(la1) * math.cos(la2) * math.sin((lo2 - lo1) / 2) ** 2
    return 2 * radius * math.asin(min(1.0, math.sqrt(h)))


def neighbors(points, i, eps, dist=euclid):
    return {j for j in range(len(points)) if dist(points[i], points[j]) <= eps}


def dbscan(points, eps, min_pts, dist=euclid):
    """Labels from the definitions: core test, core-core flood fill, border claim, relabel."""
    n = len(points)
    nbrs = [neighbors(points, i, eps, dist) for i in range(n)]
    core = [len(nbrs[i]) >= min_pts for i in range(n)]
    comp = [None] * n
    next_id = 0
    for s in range(n):
        if not core[s] or comp[s] is not None:
            continue
        stack = [s]
        comp[s] = next_id
        while stack:
            u = stack.pop()
            for v in nbrs[u]:
                if core[v] and comp[v] is None:
                    comp[v] = next_id
                    stack.append(v)
        next_id += 1
    raw = list(comp)
    for i in range(n):
        if not core[i]:
            owners = sorted(j for j in nbrs[i] if core[j])
            raw[i] = comp[owners[0]] if owners else None
    order = []
    for i in range(n):
        if raw[i] is not None and raw[i] not in order:
            order.append(raw[i])
    rename = {c: k + 1 for k, c in enumerate(order)}
    return [rename[r] if r is not None else -1 for r in raw], core


def mst_weights(points, dist=euclid):
    """Kruskal over every pair with a naive union-find."""
    n = len(points)
    edges = sorted((dist(points[i], points[j]), i, j) for i in range(n) for j in range(i + 1, n))
    parent = list(range(n))

    def root(x):
        while parent[x] != x:
            x = parent[x]
        return x

    out = []
    for w, i, j in edges:
        a, b = root(i), root(j)
        if a != b:
            parent[a] = b
            out.append(w)
    return out


def schedule(points, dist=euclid):
    return sorted({w for w in mst_weights(points, dist) if w > 0}, reverse=True)


def adaptive_min_pts(points, eps, dist=euclid):
    n = len(points)
    total = 0
    for i in range(n):
        total += len({tuple(points[j]) for j in range(n) if dist(points[i], points[j]) <= eps})
    return total / n


def entropy10(intervals, bin_width=1):
    if len(intervals) < 2:
        return 0.0
    counts = Counter(v // bin_width for v in intervals)
    m = len(intervals)
    return -sum((c / m) * math.log10(c / m) for c in counts.values())


def major(labels):
    sizes = Counter(l for l in labels if l != -1)
    noise = sum(1 for l in labels if l == -1)
    if not sizes:
        return None
    top = max(sizes.values())
    winners = [c for c, s in sizes.items() if s == top]
    if len(winners) > 1 or top <= noise:
        return None
    return winners[0]


def replay(points, times, regular_gap_required=True):
    """Step-by-step rerun of the shrinking-radius loop on sorted input.

    Returns (eps_star, members, outcomes). ``points`` and ``times`` must be
    in canonical dataset order.
    """
    sched = schedule(points)
    eps_star, members = sched[0], list(range(len(points)))
    outcomes = []
    for eps in sched:
        labels, _ = dbscan(points, eps, adaptive_min_pts(points, eps))
        m = major(labels)
        if m is None:
            outcomes.append("stop-no-major")
            break
        h = {}
        for c in set(labels) - {-1}:
            ts = [times[i] for i in range(len(points)) if labels[i] == c]
            h[c] = entropy10([b - a for a, b in zip(ts, ts[1:])])
        delta = (max(h.values()) - min(h.values())) / 2
        bad = [c for c in h if c != m and (h[c] - h[m] < delta or (regular_gap_required and h[c] - h[m] <= 0))]
        if bad:
            outcomes.append("stop-regularity-violated")
            break
        outcomes.append("accepted")
        eps_star, members = eps, [i for i in range(len(points)) if labels[i] == m]
    return eps_star, members, outcomes


def point_in_ring(x, y, ring):
    inside = False
    for (x1, y1), (x2, y2) in zip(ring, ring[1:]):
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xc:
                inside = not inside
    return inside

"""Marching squares over a boolean membership raster, producing closed rings."""
from __future__ import annotations

from typing import Callable

import numpy as np

# Cell corners in (x=col, y=row) with y up: 0=(c,r) 1=(c+1,r) 2=(c+1,r+1) 3=(c,r+1).
# Edge k joins corner k to corner k+1 going counter-clockwise. Segments run from
# an edge where that walk leaves the inside to one where it re-enters, which
# puts the inside on the left: exterior rings counter-clockwise, holes clockwise.


def _build_cases():
    cases, saddles = {}, {}
    for k in range(1, 15):
        ins = [(k >> b) & 1 for b in range(4)]
        exits = [e for e in range(4) if ins[e] and not ins[(e + 1) % 4]]
        entries = [e for e in range(4) if not ins[e] and ins[(e + 1) % 4]]
        if len(exits) == 1:
            cases[k] = [(exits[0], entries[0])]
            continue
        # saddle: isolate each inside corner, or each outside corner
        separated = [(c, (c - 1) % 4) for c in range(4) if ins[c]]
        joined = [((c - 1) % 4, c) for c in range(4) if not ins[c]]
        saddles[k] = (separated, joined)
    return cases, saddles


_CASES, _SADDLES = _build_cases()


def _edge_key(r: int, c: int, e: int) -> tuple[int, int, int]:
    # canonical id shared by the two cells touching an edge: (row, col, horizontal?)
    if e == 0:
        return (r, c, 1)
    if e == 2:
        return (r + 1, c, 1)
    if e == 3:
        return (r, c, 0)
    return (r, c + 1, 0)


def trace_rings(inside: np.ndarray, center_inside: Callable[[int, int], bool]) -> list[list[tuple[int, int, int]]]:
    """Closed rings as lists of grid-edge keys.

    ``inside`` must be False along its whole border so every ring closes.
    """
    rows, cols = inside.shape
    code = (inside[:-1, :-1].astype(np.uint8)
            | (inside[:-1, 1:].astype(np.uint8) << 1)
            | (inside[1:, 1:].astype(np.uint8) << 2)
            | (inside[1:, :-1].astype(np.uint8) << 3))
    nxt: dict[tuple[int, int, int], tuple[int, int, int]] = {}
    for r, c in zip(*np.nonzero((code != 0) & (code != 15))):
        r, c = int(r), int(c)
        k = int(code[r, c])
        if k in _SADDLES:
            segs = _SADDLES[k][1] if center_inside(r, c) else _SADDLES[k][0]
        else:
            segs = _CASES[k]
        for a, b in segs:
            nxt[_edge_key(r, c, a)] = _edge_key(r, c, b)
    rings = []
    seen = set()
    for start in sorted(nxt):
        if start in seen:
            continue
        ring = []
        key = start
        while key not in seen:
            seen.add(key)
            ring.append(key)
            key = nxt[key]
        rings.append(ring)
    return rings


def ring_area(xy: np.ndarray) -> float:
    """Signed shoelace area of a closed ring (positive = counter-clockwise)."""
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))

"""Marching squares on a rectilinear grid.

Crossings are linear along cell edges (so they are exact for the bilinear
interpolant), saddle cells are split using the cell-centre average, and the
resulting segments are chained into polylines.  Cells touching a masked node
are skipped.
"""

from __future__ import annotations

import numpy as np

# edges of a cell with corners 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1)
_EDGES = ((0, 1), (1, 2), (3, 2), (0, 3))
_CORNER = ((0, 0), (1, 0), (1, 1), (0, 1))


def _crossing(x, y, i, j, edge, values, level):
    a, b = _EDGES[edge]
    (da_i, da_j), (db_i, db_j) = _CORNER[a], _CORNER[b]
    fa, fb = values[a], values[b]
    t = (level - fa) / (fb - fa)
    # convex combination so t=0 and t=1 reproduce the node coordinates bit for bit
    px = (1 - t) * x[i + da_i] + t * x[i + db_i]
    py = (1 - t) * y[j + da_j] + t * y[j + db_j]
    return (float(px), float(py))


def _cell_segments(above, vals, level):
    """Edge pairs crossed by the level set in one cell."""
    crossed = [e for e, (a, b) in enumerate(_EDGES) if above[a] != above[b]]
    if not crossed:
        return []
    if len(crossed) == 2:
        return [tuple(crossed)]
    # saddle: all four edges crossed
    centre_above = np.mean(vals) >= level
    if centre_above == above[0]:
        # corners 0 and 2 connect through the centre; isolate corners 1 and 3
        return [(0, 1), (2, 3)]
    return [(0, 3), (1, 2)]


def marching_squares(x, y, f, level, mask=None) -> list[np.ndarray]:
    """Polylines of {f = level}; ``f[i, j]`` is sampled at (x[i], y[j])."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    f = np.asarray(f, float)
    if f.shape != (len(x), len(y)):
        raise ValueError(f"field shape {f.shape} does not match grid ({len(x)}, {len(y)})")
    bad = ~np.isfinite(f)
    if mask is not None:
        bad = bad | np.asarray(mask, bool)
    if not np.isfinite(level):
        return []
    segments = []
    nx, ny = f.shape
    for i in range(nx - 1):
        for j in range(ny - 1):
            if bad[i, j] or bad[i + 1, j] or bad[i + 1, j + 1] or bad[i, j + 1]:
                continue
            vals = (f[i, j], f[i + 1, j], f[i + 1, j + 1], f[i, j + 1])
            above = tuple(v >= level for v in vals)
            for e1, e2 in _cell_segments(above, vals, level):
                p = _crossing(x, y, i, j, e1, vals, level)
                q = _crossing(x, y, i, j, e2, vals, level)
                if p != q:
                    segments.append((p, q))
    return _chain(segments)


def _chain(segments) -> list[np.ndarray]:
    """Join segments sharing end points into maximal polylines."""
    adj: dict = {}
    for s, (p, q) in enumerate(segments):
        adj.setdefault(p, []).append(s)
        adj.setdefault(q, []).append(s)
    used = [False] * len(segments)

    def walk(start, seg):
        line = [start]
        cur = start
        while seg is not None:
            used[seg] = True
            p, q = segments[seg]
            cur = q if p == cur else p
            line.append(cur)
            seg = next((t for t in adj[cur] if not used[t]), None)
        return line

    lines = []
    # open chains first: start from points of odd degree
    for pt, segs in adj.items():
        if len(segs) % 2 == 1:
            s = next((t for t in segs if not used[t]), None)
            if s is not None:
                lines.append(walk(pt, s))
    for s, (p, _) in enumerate(segments):
        if not used[s]:
            lines.append(walk(p, s))
    return [np.array(line) for line in lines]


def bilinear(x, y, f, px, py) -> float:
    """Bilinear interpolant of ``f`` at (px, py)."""
    i = int(np.clip(np.searchsorted(x, px, side="right") - 1, 0, len(x) - 2))
    j = int(np.clip(np.searchsorted(y, py, side="right") - 1, 0, len(y) - 2))
    tx = (px - x[i]) / (x[i + 1] - x[i])
    ty = (py - y[j]) / (y[j + 1] - y[j])
    return float(
        (1 - tx) * (1 - ty) * f[i, j] + tx * (1 - ty) * f[i + 1, j] + tx * ty * f[i + 1, j + 1] + (1 - tx) * ty * f[i, j + 1]
    )

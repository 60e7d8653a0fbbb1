"""Brute-force reference implementations used as test oracles.

Each one is written straight from the metric's definition with plain loops
and the standard library, sharing no code with the package.
"""

from __future__ import annotations

import math

import numpy as np


def _track(t):
    return [(int(f), float(x), float(y)) for f, (x, y) in zip(t.frames, t.xy)]


def stationary_pct(tset, thresh=0.2):
    still = 0
    for t in tset.trajectories:
        s = _track(t)
        d = math.sqrt((s[-1][1] - s[0][1]) ** 2 + (s[-1][2] - s[0][2]) ** 2)
        still += d < thresh
    return 100.0 * still / len(tset.trajectories)


def speeds(tset):
    out = []
    for t in tset.trajectories:
        s = _track(t)
        n = len(s)
        if n < 2:
            continue
        for i in range(n):
            a, b = (i, i + 1) if i == 0 else (i - 1, i) if i == n - 1 else (i - 1, i + 1)
            dt = (s[b][0] - s[a][0]) / tset.fps
            out.append(math.sqrt((s[b][1] - s[a][1]) ** 2 + (s[b][2] - s[a][2]) ** 2) / dt)
    return out


def average_speed(tset):
    v = speeds(tset)
    return math.fsum(v) / len(v)


def mean_distance(tset):
    total = []
    for t in tset.trajectories:
        s = _track(t)
        total.append(math.fsum(
            math.sqrt((s[i + 1][1] - s[i][1]) ** 2 + (s[i + 1][2] - s[i][2]) ** 2) for i in range(len(s) - 1)
        ))
    return math.fsum(total) / len(total)


def passing_distance(tset, radius=10.0):
    """Mean closest approach over approaching mutual-nearest-neighbour pairs, or None."""
    pos = {t.pedestrian_id: {f: (x, y) for f, x, y in _track(t)} for t in tset.trajectories}
    ids = sorted(pos)

    def dist(a, b, f):
        (xa, ya), (xb, yb) = pos[a][f], pos[b][f]
        return math.sqrt((xa - xb) ** 2 + (ya - yb) ** 2)

    def nearest(a, f):
        best, who = math.inf, None
        for b in ids:  # id order, so the first id wins ties
            if b != a and f in pos[b]:
                d = dist(a, b, f)
                if d < best:
                    best, who = d, b
        return who

    found = []
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            shared = sorted(set(pos[a]) & set(pos[b]))
            if not shared:
                continue
            ds = [dist(a, b, f) for f in shared]
            dmin = min(ds)
            fstar = shared[ds.index(dmin)]
            if dmin < radius and nearest(a, fstar) == b and nearest(b, fstar) == a and ds[0] > dmin:
                found.append(dmin)
    return math.fsum(found) / len(found) if found else None


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------

def shoelace(poly):
    n = len(poly)
    return 0.5 * math.fsum(poly[i][0] * poly[(i + 1) % n][1] - poly[(i + 1) % n][0] * poly[i][1] for i in range(n))


def inside_convex(poly, pts, margin=0.0):
    """Vectorized: True where every edge cross product is >= margin * edge length (CCW polygon)."""
    pts = np.asarray(pts, dtype=np.float64)
    ok = np.ones(len(pts), dtype=bool)
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        ex, ey = x1 - x0, y1 - y0
        cross = ex * (pts[:, 1] - y0) - ey * (pts[:, 0] - x0)
        ok &= cross >= margin * math.hypot(ex, ey)
    return ok


def probe_mismatches(seeds, cells, boundary, probes, band=1e-9):
    """Probes whose true nearest seed's cell does not hold them (outside the tie band)."""
    d = np.sqrt(((probes[:, None, :] - seeds[None, :, :]) ** 2).sum(axis=2))
    order = np.argsort(d, axis=1)
    nearest = order[:, 0]
    if seeds.shape[0] > 1:
        gap = d[np.arange(len(probes)), order[:, 1]] - d[np.arange(len(probes)), nearest]
        clear = gap > band
    else:
        clear = np.ones(len(probes), dtype=bool)
    bad = 0
    for k, cell in enumerate(cells):
        mine = clear & (nearest == k)
        held = inside_convex(cell.vertices, probes, -band)
        strictly = inside_convex(cell.vertices, probes, band)
        bad += int(np.count_nonzero(mine & ~held))
        bad += int(np.count_nonzero(clear & (nearest != k) & strictly))
    return bad


def random_convex(rng, scale=10.0):
    """Hull of a few random points; CCW, non-degenerate."""
    while True:
        n = int(rng.integers(3, 13))
        pts = rng.uniform(-scale, scale, (n, 2)) * rng.uniform(0.2, 1.0, 2) + rng.uniform(-50, 50, 2)
        hull = _hull(pts.tolist())
        if len(hull) >= 3 and shoelace(hull) > 1.0:
            return hull


def _hull(points):
    pts = sorted(map(tuple, points))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lo, hi = [], []
    for p in pts:
        while len(lo) >= 2 and cross(lo[-2], lo[-1], p) <= 0:
            lo.pop()
        lo.append(p)
    for p in reversed(pts):
        while len(hi) >= 2 and cross(hi[-2], hi[-1], p) <= 0:
            hi.pop()
        hi.append(p)
    return lo[:-1] + hi[:-1]


def sample_inside(rng, poly, n, margin=1e-6):
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    out = np.empty((0, 2))
    while len(out) < n:
        cand = np.column_stack([rng.uniform(min(xs), max(xs), 4 * n), rng.uniform(min(ys), max(ys), 4 * n)])
        out = np.vstack([out, cand[inside_convex(poly, cand, margin)]])
    return out[:n]


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

def emd_1d(p, q, width):
    """Earth mover's distance between two distributions on equal-width bins, by explicit transport."""
    carried, cost = 0.0, 0.0
    for a, b in zip(p[:-1], q[:-1]):
        carried += a - b
        cost += abs(carried) * width
    return cost


def eigvec_2x2(a, b, c):
    """Unit eigenvector of [[a, b], [b, c]] for the larger eigenvalue, in closed form."""
    theta = 0.5 * math.atan2(2.0 * b, a - c)
    return math.cos(theta), math.sin(theta)

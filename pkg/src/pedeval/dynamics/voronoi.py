"""Bounded Voronoi cells by repeated half-plane clipping of a convex boundary.

Polygons are lists of ``(x, y)`` tuples in counterclockwise order. The inner
loops run on plain floats: cells are small and numpy's per-call overhead
dominates at that size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import PointOutsideBoundary

Polygon = list[tuple[float, float]]

COINCIDENT_EPS = 1e-6


@dataclass(frozen=True)
class VoronoiCell:
    owner: int
    vertices: tuple[tuple[float, float], ...]
    area: float

    @property
    def density(self) -> float:
        return 1.0 / self.area


def polygon_area(poly: Sequence[Sequence[float]]) -> float:
    """Signed shoelace area (positive for counterclockwise)."""
    n = len(poly)
    if n < 3:
        return 0.0
    terms = []
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        terms.append(x0 * y1 - x1 * y0)
    return 0.5 * math.fsum(terms)


def convex_hull(points) -> Polygon:
    """Andrew's monotone chain; counterclockwise, no collinear vertices."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: Polygon = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: Polygon = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def clip_halfplane(poly: Polygon, nx: float, ny: float, c: float) -> Polygon:
    """Keep the part of convex ``poly`` where ``nx*x + ny*y <= c``."""
    out: Polygon = []
    n = len(poly)
    if n == 0:
        return out
    prev = poly[-1]
    sp = nx * prev[0] + ny * prev[1] - c
    for cur in poly:
        sc = nx * cur[0] + ny * cur[1] - c
        if sc <= 0.0:
            if sp > 0.0:
                t = sp / (sp - sc)
                out.append((prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])))
            out.append(cur)
        elif sp <= 0.0:
            t = sp / (sp - sc)
            out.append((prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])))
        prev, sp = cur, sc
    return out


def contains(poly: Sequence[Sequence[float]], x: float, y: float, tol: float = 0.0) -> bool:
    """Point-in-convex-polygon test; points within ``tol`` of an edge count as inside."""
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        ex, ey = x1 - x0, y1 - y0
        cross = ex * (y - y0) - ey * (x - x0)
        if cross < -tol * math.hypot(ex, ey):
            return False
    return True


def strictly_inside(poly: Sequence[Sequence[float]], x: float, y: float) -> bool:
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        if (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0) <= 0.0:
            return False
    return True


def separate_coincident(xy: np.ndarray) -> np.ndarray:
    """Nudge exact duplicates apart by 1e-6 m so every seed owns a cell.

    The k-th repeat of a location (in input order) moves by ``k * 1e-6`` m
    along the direction at angle ``k`` radians.
    """
    out = np.array(xy, dtype=np.float64, copy=True)
    seen: dict[tuple[float, float], int] = {}
    for i, (x, y) in enumerate(out.tolist()):
        key = (x, y)
        k = seen.get(key, 0)
        if k:
            out[i, 0] += k * COINCIDENT_EPS * math.cos(k)
            out[i, 1] += k * COINCIDENT_EPS * math.sin(k)
        seen[key] = k + 1
    return out


def voronoi_cells(points, boundary: Sequence[Sequence[float]]) -> list[VoronoiCell]:
    """Voronoi cell of every seed, clipped to a convex ``boundary``.

    ``points`` is a sequence of ``(owner_id, (x, y))``. Each cell starts as the
    boundary and is clipped by the perpendicular bisector against each other
    seed, nearest first; clipping stops once the remaining seeds are farther
    than twice the cell's radius, since their bisectors can no longer reach it.
    """
    ids = [int(pid) for pid, _ in points]
    xy = np.array([tuple(p) for _, p in points], dtype=np.float64).reshape(-1, 2)
    bound = [(float(x), float(y)) for x, y in boundary]
    if polygon_area(bound) < 0:
        bound.reverse()
    for pid, (x, y) in zip(ids, xy.tolist()):
        if not strictly_inside(bound, x, y):
            raise PointOutsideBoundary(f"pedestrian {pid} at ({x:.6g}, {y:.6g}) is not inside the boundary")
    xy = separate_coincident(xy)
    n = len(xy)
    cells = []
    for i in range(n):
        px, py = xy[i]
        d = xy - xy[i]
        dist2 = d[:, 0] ** 2 + d[:, 1] ** 2
        order = np.argsort(dist2, kind="stable")
        # work relative to the seed to keep the arithmetic well-scaled
        poly = [(x - px, y - py) for x, y in bound]
        r2 = max(x * x + y * y for x, y in poly)
        for j in order.tolist():
            if j == i:
                continue
            dd = dist2[j]
            if dd >= 4.0 * r2:
                break
            nx, ny = d[j]
            poly = clip_halfplane(poly, nx, ny, 0.5 * dd)
            r2 = max(x * x + y * y for x, y in poly)
        verts = tuple((x + px, y + py) for x, y in poly)
        cells.append(VoronoiCell(ids[i], verts, polygon_area(poly)))
    return cells


def dilated_hull(points, margin: float = 1.0) -> Polygon:
    """Convex region around ``points`` with every hull vertex pushed ``margin`` outward.

    Each vertex moves radially away from the hull's vertex centroid; the result
    is the hull of the original and moved vertices. Degenerate inputs (fewer
    than three non-collinear points) fall back to the bounding box grown by
    ``margin`` on every side.
    """
    hull = convex_hull(points)
    if len(hull) >= 3 and polygon_area(hull) > 1e-12:
        cx = math.fsum(x for x, _ in hull) / len(hull)
        cy = math.fsum(y for _, y in hull) / len(hull)
        grown = []
        for x, y in hull:
            dx, dy = x - cx, y - cy
            r = math.hypot(dx, dy)
            grown.append((x + margin * dx / r, y + margin * dy / r))
        return convex_hull(hull + grown)
    arr = np.asarray(list(points), dtype=np.float64).reshape(-1, 2)
    x0, y0 = arr.min(axis=0) - margin
    x1, y1 = arr.max(axis=0) + margin
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]

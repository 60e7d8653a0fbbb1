"""Distribution-valued metrics: heatmaps, velocity profile, fundamental diagram, neighbour layout."""

from __future__ import annotations

import math

import numpy as np

from ..core import TrajectorySet, velocity_series
from ..errors import EmptySet, InsufficientData, NoMovers
from .config import DynamicsConfig
from .frames import nearest_neighbors, pairwise_distances, snapshots
from .histograms import FundamentalDiagram, GaussianFit, Histogram1D, Histogram2D, PolarHistogram
from .metrics import is_stationary
from .voronoi import dilated_hull, strictly_inside, voronoi_cells

DEFAULT = DynamicsConfig()

Extent = tuple[float, float, float, float]  # xmin, xmax, ymin, ymax


def mover_velocities(tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT) -> np.ndarray:
    """Pooled velocity samples of non-stationary pedestrians, shape (n, 2)."""
    vs = [
        velocity_series(t, tset.fps, cfg.velocity_smoothing)[1]
        for t in tset
        if len(t) >= 2 and not is_stationary(t, cfg)
    ]
    return np.concatenate(vs) if vs else np.empty((0, 2))


def _fix_sign(axis: np.ndarray) -> np.ndarray:
    x, y = float(axis[0]), float(axis[1])
    if abs(x) < 1e-12:
        return np.array([0.0, abs(y)])
    if x < 0:
        return np.array([-x, -y])
    return np.array([x, y])


def primary_axis(tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT) -> np.ndarray:
    """Dominant direction of motion as a unit vector with x >= 0 (y >= 0 if x == 0).

    Principal eigenvector of the uncentred second-moment matrix of mover
    velocities, so one-way and two-way flows along the same line give the
    same axis.
    """
    v = mover_velocities(tset, cfg)
    if len(v) == 0:
        raise NoMovers(f"no non-stationary pedestrian in {tset.scene_id!r}")
    m = v.T @ v
    if not np.any(m):
        raise NoMovers(f"mover velocities in {tset.scene_id!r} are all zero")
    _, vecs = np.linalg.eigh(m)
    axis = vecs[:, -1]
    return _fix_sign(axis / np.hypot(axis[0], axis[1]))


def gaussian_fit(samples) -> GaussianFit:
    """Maximum-likelihood normal fit: sample mean, population (1/N) std."""
    s = np.asarray(samples, dtype=np.float64).reshape(-1)
    if s.size == 0:
        raise InsufficientData("cannot fit a Gaussian to zero samples")
    mean = math.fsum(s.tolist()) / s.size
    var = math.fsum(((s - mean) ** 2).tolist()) / s.size
    return GaussianFit(mean, math.sqrt(var), int(s.size))


def histogram_1d(samples, bins: int, lo: float, hi: float) -> Histogram1D:
    """Equal-width histogram on [lo, hi]; out-of-range samples land in the end bins."""
    edges = np.linspace(lo, hi, bins + 1)
    s = np.clip(np.asarray(samples, dtype=np.float64), lo, hi)
    counts, _ = np.histogram(s, bins=edges)
    return Histogram1D(edges, counts.astype(np.float64))


def longitudinal_samples(tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT, axis=None) -> np.ndarray:
    if axis is None:
        axis = primary_axis(tset, cfg)
    v = mover_velocities(tset, cfg)
    if len(v) == 0:
        raise NoMovers(f"no non-stationary pedestrian in {tset.scene_id!r}")
    return v @ np.asarray(axis, dtype=np.float64)


def longitudinal_velocity_distribution(
    tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT, axis=None
) -> tuple[Histogram1D, GaussianFit]:
    s = longitudinal_samples(tset, cfg, axis)
    lo, hi = cfg.velocity_range_mps
    return histogram_1d(s, cfg.velocity_hist_bins, lo, hi), gaussian_fit(s)


def default_boundary(tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT):
    pts = tset.all_positions()
    if len(pts) == 0:
        raise EmptySet(f"trajectory set {tset.scene_id!r} is empty")
    return dilated_hull(pts.tolist(), cfg.boundary_margin_m)


def density_speed_samples(
    tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT, boundary=None
) -> tuple[np.ndarray, np.ndarray]:
    """Per-pedestrian (Voronoi density, speed) pairs from frames with 2+ people inside ``boundary``."""
    if boundary is None:
        boundary = default_boundary(tset, cfg)
    bound = [(float(x), float(y)) for x, y in boundary]
    rho, speed = [], []
    for snap in snapshots(tset, cfg.velocity_smoothing):
        inside = [i for i, (x, y) in enumerate(snap.xy.tolist()) if strictly_inside(bound, x, y)] \
            if len(snap) >= 2 else []
        if len(inside) < 2:
            continue
        cells = voronoi_cells([(snap.ids[i], snap.xy[i]) for i in inside], bound)
        for i, cell in zip(inside, cells):
            v = snap.vel[i]
            if np.all(np.isfinite(v)):
                rho.append(1.0 / cell.area)
                speed.append(math.hypot(v[0], v[1]))
    return np.array(rho), np.array(speed)


def fundamental_diagram(tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT, boundary=None) -> FundamentalDiagram:
    """Mean speed per local-density bin.

    Local density is the reciprocal Voronoi cell area (persons/m^2) within
    ``boundary`` (default: the set's hull grown by ``boundary_margin_m``).
    Bins are equal-width over the observed density range; when every sample
    has the same density a single 1-wide bin centred on it is used.
    """
    rho, speed = density_speed_samples(tset, cfg, boundary)
    if rho.size == 0:
        raise InsufficientData(f"no frame in {tset.scene_id!r} has two or more pedestrians with velocities")
    lo, hi = float(rho.min()), float(rho.max())
    if hi > lo:
        edges = np.linspace(lo, hi, cfg.fd_density_bins + 1)
    else:
        edges = np.array([lo - 0.5, lo + 0.5])
    counts, _ = np.histogram(rho, bins=edges)
    sums, _ = np.histogram(rho, bins=edges, weights=speed)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return FundamentalDiagram(edges, mean, counts.astype(np.float64), rho, speed)


def polar_theta_edges(n: int) -> np.ndarray:
    width = 2.0 * math.pi / n
    return -0.5 * width + width * np.arange(n + 1)


def nearest_neighbor_offsets(tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT) -> np.ndarray:
    """Nearest neighbour position in each walker's heading frame, as (r, theta) rows.

    Only frames with at least two pedestrians count, and only walkers moving
    at ``min_speed_for_heading_mps`` or faster (slower headings are noise).
    """
    rows = []
    qualifying = 0
    for snap in snapshots(tset, cfg.velocity_smoothing):
        if len(snap) < 2:
            continue
        qualifying += 1
        nn = nearest_neighbors(pairwise_distances(snap.xy))
        for a in range(len(snap)):
            vx, vy = snap.vel[a]
            speed = math.hypot(vx, vy)
            if not speed >= cfg.min_speed_for_heading_mps:
                continue
            ox, oy = snap.xy[nn[a]] - snap.xy[a]
            cos, sin = vx / speed, vy / speed
            fwd = ox * cos + oy * sin
            left = -ox * sin + oy * cos
            rows.append((math.hypot(fwd, left), math.atan2(left, fwd)))
    if qualifying == 0:
        raise InsufficientData(f"no frame in {tset.scene_id!r} shows two or more pedestrians")
    return np.array(rows, dtype=np.float64).reshape(-1, 2)


def nearest_neighbor_polar(tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT) -> PolarHistogram:
    rt = nearest_neighbor_offsets(tset, cfg)
    if len(rt) == 0:
        raise InsufficientData(f"no walker in {tset.scene_id!r} is fast enough to define a heading")
    nr, nt = cfg.polar_r_bins, cfg.polar_theta_bins
    r_edges = np.linspace(0.0, cfg.polar_r_max_m, nr + 1)
    width = 2.0 * math.pi / nt
    ri = np.minimum((rt[:, 0] / cfg.polar_r_max_m * nr).astype(np.int64), nr - 1)
    ti = np.floor(np.mod(rt[:, 1] + 0.5 * width, 2.0 * math.pi) / width).astype(np.int64)
    ti = np.minimum(ti, nt - 1)
    counts = np.zeros((nr, nt))
    np.add.at(counts, (ri, ti), 1.0)
    return PolarHistogram(r_edges, polar_theta_edges(nt), counts)


def bounding_extent(tset: TrajectorySet) -> Extent:
    pts = tset.all_positions()
    if len(pts) == 0:
        raise EmptySet(f"trajectory set {tset.scene_id!r} is empty")
    (x0, y0), (x1, y1) = pts.min(axis=0), pts.max(axis=0)
    return float(x0), float(x1), float(y0), float(y1)


def _axis_edges(lo: float, hi: float, step: float) -> np.ndarray:
    n = max(1, int(math.ceil((hi - lo) / step - 1e-9)))
    return lo + step * np.arange(n + 1)


def position_heatmap(tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT, extent: Extent | None = None) -> Histogram2D:
    """Counts of world positions on a ``heatmap_bin_m`` grid anchored at the extent's lower corner.

    Positions outside the extent are dropped. The default extent is the set's
    own bounding box; pass the ground-truth extent to compare sets bin for bin.
    """
    pts = tset.all_positions()
    if len(tset) == 0:
        raise EmptySet(f"trajectory set {tset.scene_id!r} is empty")
    if extent is None:
        extent = bounding_extent(tset)
    x0, x1, y0, y1 = (float(e) for e in extent)
    xe = _axis_edges(x0, x1, cfg.heatmap_bin_m)
    ye = _axis_edges(y0, y1, cfg.heatmap_bin_m)
    inside = (pts[:, 0] >= x0) & (pts[:, 0] <= x1) & (pts[:, 1] >= y0) & (pts[:, 1] <= y1)
    p = pts[inside]
    counts, _, _ = np.histogram2d(p[:, 0], p[:, 1], bins=[xe, ye])
    return Histogram2D(xe, ye, counts)

"""Scalar pedestrian-dynamics statistics (one number per trajectory set)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import TrajectorySet, displacement, path_length, velocity_series
from ..errors import EmptySet, NoQualifyingPairs, NoVelocitySamples
from .config import DynamicsConfig
from .frames import nearest_neighbors, pairwise_distances, snapshots

DEFAULT = DynamicsConfig()


def _require_nonempty(tset: TrajectorySet) -> None:
    if not tset.trajectories:
        raise EmptySet(f"trajectory set {tset.scene_id!r} is empty")


def is_stationary(traj, cfg: DynamicsConfig = DEFAULT) -> bool:
    return displacement(traj) < cfg.stationary_thresh_m


def stationary_fraction(tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT) -> float:
    """Percentage of pedestrians whose start-to-end displacement is below the threshold."""
    _require_nonempty(tset)
    n_still = sum(1 for t in tset if is_stationary(t, cfg))
    return 100.0 * n_still / len(tset)


def speed_samples(tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT) -> np.ndarray:
    mags = [
        np.hypot(v[:, 0], v[:, 1])
        for t in tset
        if len(t) >= 2
        for v in [velocity_series(t, tset.fps, cfg.velocity_smoothing)[1]]
    ]
    return np.concatenate(mags) if mags else np.empty(0)


def average_speed(tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT) -> float:
    """Mean speed pooled over every velocity sample of every pedestrian.

    Stationary pedestrians are included; single-sample tracks have no
    velocity and contribute nothing.
    """
    s = speed_samples(tset, cfg)
    if s.size == 0:
        raise NoVelocitySamples(f"no trajectory in {tset.scene_id!r} has two or more samples")
    return math.fsum(s.tolist()) / s.size


def mean_distance_traveled(tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT) -> float:
    _require_nonempty(tset)
    return math.fsum(path_length(t) for t in tset) / len(tset)


@dataclass(frozen=True)
class PassingEvent:
    id_a: int
    id_b: int
    distance: float
    frame: int
    first_distance: float
    mutual_nearest: bool


def closest_approaches(tset: TrajectorySet) -> list[PassingEvent]:
    """Closest approach of every pair that is ever visible together.

    Pairs are keyed with the smaller id first; the earliest frame wins ties in
    the minimum distance.
    """
    first: dict[tuple[int, int], float] = {}
    best: dict[tuple[int, int], tuple[float, int, bool]] = {}
    for snap in snapshots(tset):
        k = len(snap)
        if k < 2:
            continue
        dist = pairwise_distances(snap.xy)
        nn = nearest_neighbors(dist)
        ids = snap.ids.tolist()
        dl = dist.tolist()
        nl = nn.tolist()
        for a in range(k):
            row = dl[a]
            for b in range(a + 1, k):
                key = (ids[a], ids[b])
                d = row[b]
                prev = best.get(key)
                if prev is None:
                    first[key] = d
                    best[key] = (d, snap.frame, nl[a] == b and nl[b] == a)
                elif d < prev[0]:
                    best[key] = (d, snap.frame, nl[a] == b and nl[b] == a)
    return [
        PassingEvent(key[0], key[1], d, f, first[key], mutual)
        for key, (d, f, mutual) in sorted(best.items())
    ]


def passing_events(tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT) -> list[PassingEvent]:
    """Closest approaches that count as a pass.

    A pair qualifies when its minimum separation is below ``passing_radius_m``,
    the two are mutual nearest neighbours at that moment, and they actually
    closed in (separation at their first shared frame exceeds the minimum).
    The last two rules can be switched off in the config.
    """
    out = []
    for ev in closest_approaches(tset):
        if not ev.distance < cfg.passing_radius_m:
            continue
        if cfg.passing_mutual_nn and not ev.mutual_nearest:
            continue
        if cfg.passing_require_approach and not ev.first_distance > ev.distance:
            continue
        out.append(ev)
    return out


def passing_distance(tset: TrajectorySet, cfg: DynamicsConfig = DEFAULT) -> float:
    _require_nonempty(tset)
    events = passing_events(tset, cfg)
    if not events:
        raise NoQualifyingPairs(f"no pair in {tset.scene_id!r} passes within {cfg.passing_radius_m:g} m")
    return math.fsum(e.distance for e in events) / len(events)

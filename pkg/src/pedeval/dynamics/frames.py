from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import TrajectorySet, velocity_series


@dataclass(frozen=True, eq=False)
class FrameSnapshot:
    """Everyone visible in one frame, ordered by pedestrian id.

    ``vel`` rows are NaN for single-sample tracks (no velocity available).
    """

    frame: int
    ids: np.ndarray
    xy: np.ndarray
    vel: np.ndarray

    def __len__(self) -> int:
        return len(self.ids)


def snapshots(tset: TrajectorySet, smoothing: int = 1) -> list[FrameSnapshot]:
    if not tset.trajectories:
        return []
    frames, ids, xy, vel = [], [], [], []
    for t in tset:
        frames.append(t.frames)
        ids.append(np.full(len(t), t.pedestrian_id, dtype=np.int64))
        xy.append(t.xy)
        if len(t) >= 2:
            vel.append(velocity_series(t, tset.fps, smoothing)[1])
        else:
            vel.append(np.full((len(t), 2), np.nan))
    frames = np.concatenate(frames)
    ids = np.concatenate(ids)
    xy = np.concatenate(xy)
    vel = np.concatenate(vel)
    order = np.lexsort((ids, frames))
    frames, ids, xy, vel = frames[order], ids[order], xy[order], vel[order]
    cuts = np.flatnonzero(np.diff(frames)) + 1
    out = []
    for lo, hi in zip(np.r_[0, cuts], np.r_[cuts, len(frames)]):
        out.append(FrameSnapshot(int(frames[lo]), ids[lo:hi], xy[lo:hi], vel[lo:hi]))
    return out


def pairwise_distances(xy: np.ndarray) -> np.ndarray:
    d = xy[:, None, :] - xy[None, :, :]
    return np.hypot(d[..., 0], d[..., 1])


def nearest_neighbors(dist: np.ndarray) -> np.ndarray:
    """Index of each row's nearest other point (first index on ties)."""
    masked = dist.copy()
    np.fill_diagonal(masked, np.inf)
    return np.argmin(masked, axis=1)

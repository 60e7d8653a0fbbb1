"""Domain types and the small geometric kernels everything else builds on.

Coordinates
-----------
Pixel coordinates are ``(u, v)`` = (column, row), continuous, origin at the
top-left pixel. World coordinates are ``(x, y)`` in meters on the ground plane,
as defined by the scene homography.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateProjection, InvalidBox, SingularMatrix, TooShort

DET_EPS = 1e-12
W_EPS = 1e-12


class PixelPoint(NamedTuple):
    u: float
    v: float


class WorldPoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class BoundingBox:
    left: float
    top: float
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise InvalidBox(f"bounding box needs positive size, got {self.width}x{self.height}")


@dataclass(frozen=True)
class Detection:
    frame_index: int
    pedestrian_id: int
    bbox: BoundingBox
    confidence: float = 1.0


def _frozen_array(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SceneCalibration:
    """Pixel-to-world homography plus the clip frame rate."""

    homography: np.ndarray
    fps: float
    scene_id: str = "scene"

    def __post_init__(self):
        H = _frozen_array(self.homography, np.float64)
        if H.shape != (3, 3):
            raise SingularMatrix(f"homography must be 3x3, got shape {H.shape}")
        if not np.all(np.isfinite(H)) or abs(np.linalg.det(H)) <= DET_EPS:
            raise SingularMatrix("homography is singular (|det H| <= 1e-12)")
        if not self.fps > 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        object.__setattr__(self, "homography", H)

    def __eq__(self, other):
        if not isinstance(other, SceneCalibration):
            return NotImplemented
        return (
            self.scene_id == other.scene_id
            and self.fps == other.fps
            and np.array_equal(self.homography, other.homography)
        )


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One pedestrian's world-coordinate track.

    ``frames`` are 0-based frame indices, strictly increasing; ``xy`` has one
    row per frame.
    """

    pedestrian_id: int
    frames: np.ndarray
    xy: np.ndarray

    def __post_init__(self):
        frames = _frozen_array(self.frames, np.int64).reshape(-1)
        xy = _frozen_array(self.xy, np.float64).reshape(-1, 2)
        if len(frames) == 0:
            raise TooShort(f"trajectory {self.pedestrian_id} has no samples")
        if len(frames) != len(xy):
            raise ValueError("frames and xy must have the same length")
        if np.any(np.diff(frames) <= 0):
            raise ValueError(f"trajectory {self.pedestrian_id}: frame indices must be strictly increasing")
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "xy", xy)
        object.__setattr__(self, "pedestrian_id", int(self.pedestrian_id))

    def __len__(self) -> int:
        return len(self.frames)

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.pedestrian_id == other.pedestrian_id
            and np.array_equal(self.frames, other.frames)
            and np.array_equal(self.xy, other.xy)
        )

    def samples(self) -> Iterator[tuple[int, WorldPoint]]:
        for f, (x, y) in zip(self.frames.tolist(), self.xy.tolist()):
            yield f, WorldPoint(x, y)

    def transformed(self, fn) -> "Trajectory":
        """Copy with ``fn`` applied to the (n, 2) position array."""
        return Trajectory(self.pedestrian_id, self.frames, fn(self.xy))


@dataclass(frozen=True, eq=False)
class TrajectorySet:
    scene_id: str
    fps: float
    trajectories: tuple[Trajectory, ...] = field(default_factory=tuple)

    def __post_init__(self):
        trajs = tuple(self.trajectories)
        ids = [t.pedestrian_id for t in trajs]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate pedestrian ids in set {self.scene_id!r}")
        if not self.fps > 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        object.__setattr__(self, "trajectories", trajs)
        object.__setattr__(self, "fps", float(self.fps))

    def __len__(self) -> int:
        return len(self.trajectories)

    def __iter__(self) -> Iterator[Trajectory]:
        return iter(self.trajectories)

    def __eq__(self, other):
        if not isinstance(other, TrajectorySet):
            return NotImplemented
        return (
            self.scene_id == other.scene_id
            and self.fps == other.fps
            and self.trajectories == other.trajectories
        )

    @property
    def sample_count(self) -> int:
        return sum(len(t) for t in self.trajectories)

    def all_positions(self) -> np.ndarray:
        if not self.trajectories:
            return np.empty((0, 2))
        return np.concatenate([t.xy for t in self.trajectories])

    def transformed(self, fn) -> "TrajectorySet":
        return TrajectorySet(self.scene_id, self.fps, tuple(t.transformed(fn) for t in self.trajectories))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def ground_contact(bbox: BoundingBox) -> PixelPoint:
    """Bottom midpoint of the box, taken as where the person touches the ground."""
    return PixelPoint(bbox.left + bbox.width / 2.0, bbox.top + bbox.height)


def project(calib: SceneCalibration | np.ndarray, p: PixelPoint | Sequence[float]) -> WorldPoint:
    H = calib.homography if isinstance(calib, SceneCalibration) else np.asarray(calib, dtype=np.float64)
    u, v = float(p[0]), float(p[1])
    xh = H[0, 0] * u + H[0, 1] * v + H[0, 2]
    yh = H[1, 0] * u + H[1, 1] * v + H[1, 2]
    w = H[2, 0] * u + H[2, 1] * v + H[2, 2]
    if not abs(w) >= W_EPS:
        raise DegenerateProjection(f"pixel ({u}, {v}) maps to the line at infinity (w={w:g})")
    return WorldPoint(xh / w, yh / w)


def project_many(H: np.ndarray, uv: np.ndarray) -> np.ndarray:
    """Vectorized :func:`project`; raises on the first degenerate point."""
    uv = np.asarray(uv, dtype=np.float64).reshape(-1, 2)
    hom = np.column_stack([uv, np.ones(len(uv))]) @ np.asarray(H, dtype=np.float64).T
    w = hom[:, 2]
    bad = ~(np.abs(w) >= W_EPS)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DegenerateProjection(
            f"pixel ({uv[i, 0]}, {uv[i, 1]}) maps to the line at infinity (w={w[i]:g})"
        )
    return hom[:, :2] / w[:, None]


def _moving_average(v: np.ndarray, window: int) -> np.ndarray:
    if window <= 1:
        return v
    if window % 2 == 0:
        raise ValueError("smoothing window must be odd")
    half = window // 2
    n = len(v)
    out = np.empty_like(v)
    csum = np.vstack([np.zeros((1, v.shape[1])), np.cumsum(v, axis=0)])
    for i in range(n):
        lo, hi = max(0, i - half), min(n, i + half + 1)
        out[i] = (csum[hi] - csum[lo]) / (hi - lo)
    return out


def velocity_series(traj: Trajectory, fps: float, smoothing: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Finite-difference velocities in m/s.

    Central differences at interior samples and one-sided differences at the
    two ends. Time steps come from the actual frame gaps, so missing frames are
    handled without interpolation.

    Returns ``(frames, velocities)`` with ``velocities`` of shape (n, 2).
    """
    n = len(traj)
    if n < 2:
        raise TooShort(f"trajectory {traj.pedestrian_id} has {n} sample(s); velocity needs 2")
    t = traj.frames.astype(np.float64) / float(fps)
    p = traj.xy
    vel = np.empty((n, 2))
    vel[0] = (p[1] - p[0]) / (t[1] - t[0])
    vel[-1] = (p[-1] - p[-2]) / (t[-1] - t[-2])
    if n > 2:
        vel[1:-1] = (p[2:] - p[:-2]) / (t[2:] - t[:-2])[:, None]
    return traj.frames, _moving_average(vel, smoothing)


def displacement(traj: Trajectory) -> float:
    d = traj.xy[-1] - traj.xy[0]
    return math.hypot(d[0], d[1])


def path_length(traj: Trajectory) -> float:
    if len(traj) < 2:
        return 0.0
    steps = np.diff(traj.xy, axis=0)
    return math.fsum(np.hypot(steps[:, 0], steps[:, 1]).tolist())


def trajectory_from_samples(pedestrian_id: int, samples: Iterable[tuple[int, float, float]]) -> Trajectory:
    rows = sorted(samples, key=lambda s: s[0])
    return Trajectory(pedestrian_id, [r[0] for r in rows], [(r[1], r[2]) for r in rows])

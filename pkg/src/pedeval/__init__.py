"""Pedestrian-dynamics evaluation toolkit.

Turns tracker output into world-coordinate trajectories, screens clips for
camera motion, computes crowd-dynamics metrics, and compares candidate
trajectory sets against ground truth.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    BoundingBox,
    Detection,
    PixelPoint,
    SceneCalibration,
    Trajectory,
    TrajectorySet,
    WorldPoint,
    displacement,
    ground_contact,
    path_length,
    project,
    velocity_series,
)

__all__ = [
    "BoundingBox",
    "Detection",
    "PixelPoint",
    "SceneCalibration",
    "Trajectory",
    "TrajectorySet",
    "WorldPoint",
    "__version__",
    "displacement",
    "ground_contact",
    "path_length",
    "project",
    "velocity_series",
]

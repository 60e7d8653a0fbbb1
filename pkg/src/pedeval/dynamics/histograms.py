"""Distribution containers produced by the dynamics metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _arr(a) -> np.ndarray:
    out = np.array(a, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


class _ArrayEq:
    """Field-wise equality that understands numpy arrays (NaN == NaN)."""

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        for name in self.__dataclass_fields__:
            a, b = getattr(self, name), getattr(other, name)
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                if not np.array_equal(np.asarray(a), np.asarray(b), equal_nan=True):
                    return False
            elif a != b:
                return False
        return True

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Histogram1D(_ArrayEq):
    edges: np.ndarray
    counts: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "edges", _arr(self.edges))
        object.__setattr__(self, "counts", _arr(self.counts))

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def probabilities(self) -> np.ndarray:
        if self.normalized:
            return self.counts * self.widths
        return self.counts / self.total

    def density(self) -> np.ndarray:
        if self.normalized:
            return np.array(self.counts)
        return self.counts / (self.total * self.widths)

    def normalize(self) -> "Histogram1D":
        return Histogram1D(self.edges, self.density(), True)

    def same_binning(self, other) -> bool:
        return type(other) is type(self) and np.array_equal(self.edges, other.edges)


@dataclass(frozen=True, eq=False)
class Histogram2D(_ArrayEq):
    x_edges: np.ndarray
    y_edges: np.ndarray
    counts: np.ndarray  # (len(x_edges) - 1, len(y_edges) - 1)
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "x_edges", _arr(self.x_edges))
        object.__setattr__(self, "y_edges", _arr(self.y_edges))
        object.__setattr__(self, "counts", _arr(self.counts))

    @property
    def bin_areas(self) -> np.ndarray:
        return np.outer(np.diff(self.x_edges), np.diff(self.y_edges))

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def probabilities(self) -> np.ndarray:
        if self.normalized:
            return self.counts * self.bin_areas
        return self.counts / self.total

    def density(self) -> np.ndarray:
        if self.normalized:
            return np.array(self.counts)
        return self.counts / (self.total * self.bin_areas)

    def normalize(self) -> "Histogram2D":
        return Histogram2D(self.x_edges, self.y_edges, self.density(), True)

    def same_binning(self, other) -> bool:
        return (
            type(other) is type(self)
            and np.array_equal(self.x_edges, other.x_edges)
            and np.array_equal(self.y_edges, other.y_edges)
        )


@dataclass(frozen=True, eq=False)
class PolarHistogram(_ArrayEq):
    """Counts over (radius, heading-relative angle).

    Angle 0 points straight ahead and grows counterclockwise. Angular bins are
    centred on multiples of the bin width, so ``theta_edges`` starts at
    ``-width/2``; angles are wrapped into that range before binning.
    """

    r_edges: np.ndarray
    theta_edges: np.ndarray
    counts: np.ndarray  # (len(r_edges) - 1, len(theta_edges) - 1)
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "r_edges", _arr(self.r_edges))
        object.__setattr__(self, "theta_edges", _arr(self.theta_edges))
        object.__setattr__(self, "counts", _arr(self.counts))

    @property
    def bin_areas(self) -> np.ndarray:
        r = self.r_edges
        return np.outer(0.5 * (r[1:] ** 2 - r[:-1] ** 2), np.diff(self.theta_edges))

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def probabilities(self) -> np.ndarray:
        if self.normalized:
            return self.counts * self.bin_areas
        return self.counts / self.total

    def density(self) -> np.ndarray:
        if self.normalized:
            return np.array(self.counts)
        return self.counts / (self.total * self.bin_areas)

    def normalize(self) -> "PolarHistogram":
        return PolarHistogram(self.r_edges, self.theta_edges, self.density(), True)

    def same_binning(self, other) -> bool:
        return (
            type(other) is type(self)
            and np.array_equal(self.r_edges, other.r_edges)
            and np.array_equal(self.theta_edges, other.theta_edges)
        )


@dataclass(frozen=True)
class GaussianFit:
    mean: float
    std: float
    sample_count: int

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.std == 0:
            return np.where(x == self.mean, np.inf, 0.0)
        z = (x - self.mean) / self.std
        return np.exp(-0.5 * z * z) / (self.std * math.sqrt(2.0 * math.pi))


@dataclass(frozen=True, eq=False)
class FundamentalDiagram(_ArrayEq):
    """Binned density-speed relation.

    ``mean_speed`` is NaN for empty bins; those bins are left out of
    :meth:`slope`. The pooled per-pedestrian samples are kept for scatter
    plots.
    """

    bin_edges: np.ndarray
    mean_speed: np.ndarray
    counts: np.ndarray
    density_samples: np.ndarray
    speed_samples: np.ndarray

    def __post_init__(self):
        for name in ("bin_edges", "mean_speed", "counts", "density_samples", "speed_samples"):
            object.__setattr__(self, name, _arr(getattr(self, name)))

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def empty(self) -> np.ndarray:
        return self.counts == 0

    def slope(self) -> float:
        """Least-squares slope of bin mean speed against bin centre density."""
        keep = ~self.empty
        x = self.centers[keep]
        y = self.mean_speed[keep]
        if len(x) < 2:
            return float("nan")
        xm = x - x.mean()
        return float(np.dot(xm, y - y.mean()) / np.dot(xm, xm))

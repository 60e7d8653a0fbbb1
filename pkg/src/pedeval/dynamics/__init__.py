from .config import DynamicsConfig
from .distributions import (
    bounding_extent,
    default_boundary,
    density_speed_samples,
    fundamental_diagram,
    gaussian_fit,
    histogram_1d,
    longitudinal_samples,
    longitudinal_velocity_distribution,
    mover_velocities,
    nearest_neighbor_offsets,
    nearest_neighbor_polar,
    position_heatmap,
    primary_axis,
)
from .histograms import FundamentalDiagram, GaussianFit, Histogram1D, Histogram2D, PolarHistogram
from .metrics import (
    PassingEvent,
    average_speed,
    closest_approaches,
    mean_distance_traveled,
    passing_distance,
    passing_events,
    stationary_fraction,
)
from .voronoi import VoronoiCell, convex_hull, dilated_hull, polygon_area, voronoi_cells

__all__ = [
    "DynamicsConfig",
    "FundamentalDiagram",
    "GaussianFit",
    "Histogram1D",
    "Histogram2D",
    "PassingEvent",
    "PolarHistogram",
    "VoronoiCell",
    "average_speed",
    "bounding_extent",
    "closest_approaches",
    "convex_hull",
    "default_boundary",
    "density_speed_samples",
    "dilated_hull",
    "fundamental_diagram",
    "gaussian_fit",
    "histogram_1d",
    "longitudinal_samples",
    "longitudinal_velocity_distribution",
    "mean_distance_traveled",
    "mover_velocities",
    "nearest_neighbor_offsets",
    "nearest_neighbor_polar",
    "passing_distance",
    "passing_events",
    "polygon_area",
    "position_heatmap",
    "primary_axis",
    "stationary_fraction",
    "voronoi_cells",
]

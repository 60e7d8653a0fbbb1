from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class DynamicsConfig:
    """Thresholds and binning for the pedestrian-dynamics metrics.

    ``stationary_thresh_m`` and ``passing_radius_m`` define the metrics
    themselves; everything else is a plotting/binning choice.
    """

    stationary_thresh_m: float = 0.2
    passing_radius_m: float = 10.0
    heatmap_bin_m: float = 0.5
    fd_density_bins: int = 12
    polar_r_max_m: float = 5.0
    polar_r_bins: int = 20
    polar_theta_bins: int = 36
    velocity_hist_bins: int = 40
    velocity_range_mps: tuple[float, float] = (-3.0, 3.0)
    min_speed_for_heading_mps: float = 0.1
    velocity_smoothing: int = 1
    boundary_margin_m: float = 1.0
    passing_mutual_nn: bool = True
    passing_require_approach: bool = True

    def __post_init__(self):
        for name in ("stationary_thresh_m", "passing_radius_m", "heatmap_bin_m", "polar_r_max_m",
                     "min_speed_for_heading_mps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("fd_density_bins", "polar_r_bins", "polar_theta_bins", "velocity_hist_bins",
                     "velocity_smoothing"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.velocity_smoothing % 2 == 0:
            raise ValueError("velocity_smoothing must be odd")
        lo, hi = self.velocity_range_mps
        if not hi > lo:
            raise ValueError("velocity_range_mps must be increasing")
        if self.boundary_margin_m < 0:
            raise ValueError("boundary_margin_m must be >= 0")
        object.__setattr__(self, "velocity_range_mps", (float(lo), float(hi)))

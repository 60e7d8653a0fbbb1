"""Per-scene reports and ground-truth-vs-candidate comparison tables."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import TrajectorySet
from .dynamics import (
    DynamicsConfig,
    FundamentalDiagram,
    GaussianFit,
    Histogram1D,
    Histogram2D,
    PolarHistogram,
    average_speed,
    fundamental_diagram,
    longitudinal_velocity_distribution,
    mean_distance_traveled,
    nearest_neighbor_polar,
    passing_distance,
    position_heatmap,
    primary_axis,
    stationary_fraction,
)
from .errors import BinningMismatch, EmptyCandidates, EmptySet, PedevalError, SceneMismatch
from .ingest import DEFAULT_COVERAGE_THRESHOLD, CoverageReport, validate_coverage

# (key, display name) in table order
STATISTICS = (
    ("stationary_pct", "% Stationary"),
    ("avg_speed", "Avg Speed"),
    ("dist_traveled", "Dist Traveled"),
    ("passing_dist", "Passing Dist"),
)
STATISTIC_NAMES = dict(STATISTICS)

DISTRIBUTIONS = (
    ("velocity_emd", "velocity_histogram"),
    ("heatmap_l1", "position_heatmap"),
    ("polar_l1", "polar_histogram"),
)


@dataclass(frozen=True)
class ClipCounts:
    total: int = 0
    static: int = 0
    moving: int = 0
    indeterminate: int = 0

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "ClipCounts":
        norm = [str(getattr(lab, "value", lab)).lower() for lab in labels]
        return cls(len(norm), norm.count("static"), norm.count("moving"), norm.count("indeterminate"))


@dataclass(frozen=True)
class MetricError:
    error: str
    message: str = ""

    @classmethod
    def from_exception(cls, exc: PedevalError) -> "MetricError":
        return cls(exc.code, str(exc))


@dataclass(eq=True)
class SceneReport:
    """Everything measured on one trajectory set.

    A field that could not be computed is None and has an entry in
    ``errors`` naming the structured error that prevented it.
    """

    scene_id: str
    label: str
    stationary_pct: float | None = None
    avg_speed: float | None = None
    dist_traveled: float | None = None
    passing_dist: float | None = None
    primary_axis: tuple[float, float] | None = None
    velocity_histogram: Histogram1D | None = None
    gaussian_fit: GaussianFit | None = None
    fundamental_diagram: FundamentalDiagram | None = None
    polar_histogram: PolarHistogram | None = None
    position_heatmap: Histogram2D | None = None
    coverage: CoverageReport | None = None
    clips: ClipCounts = field(default_factory=ClipCounts)
    errors: dict[str, MetricError] = field(default_factory=dict)

    def statistic(self, key: str) -> float | None:
        return getattr(self, key)


def scene_report(
    tset: TrajectorySet,
    cfg: DynamicsConfig = DynamicsConfig(),
    label: str = "",
    *,
    extent=None,
    boundary=None,
    clips: ClipCounts | None = None,
    coverage_threshold: int = DEFAULT_COVERAGE_THRESHOLD,
) -> SceneReport:
    """Run every dynamics metric on ``tset``; a failing metric is recorded, not raised.

    Raises :class:`EmptySet` only when there are no trajectories at all.
    """
    if len(tset) == 0:
        raise EmptySet(f"trajectory set {tset.scene_id!r} is empty")
    rep = SceneReport(tset.scene_id, label, clips=clips or ClipCounts())
    rep.coverage = validate_coverage(tset, coverage_threshold)

    def attempt(name, fn):
        try:
            return fn()
        except PedevalError as e:
            rep.errors[name] = MetricError.from_exception(e)
            return None

    rep.stationary_pct = attempt("stationary_pct", lambda: stationary_fraction(tset, cfg))
    rep.avg_speed = attempt("avg_speed", lambda: average_speed(tset, cfg))
    rep.dist_traveled = attempt("dist_traveled", lambda: mean_distance_traveled(tset, cfg))
    rep.passing_dist = attempt("passing_dist", lambda: passing_distance(tset, cfg))
    axis = attempt("primary_axis", lambda: primary_axis(tset, cfg))
    if axis is not None:
        rep.primary_axis = (float(axis[0]), float(axis[1]))
        hist, fit = longitudinal_velocity_distribution(tset, cfg, axis)
        rep.velocity_histogram, rep.gaussian_fit = hist, fit
    else:
        rep.errors["velocity_histogram"] = rep.errors["primary_axis"]
        rep.errors["gaussian_fit"] = rep.errors["primary_axis"]
    rep.fundamental_diagram = attempt("fundamental_diagram", lambda: fundamental_diagram(tset, cfg, boundary))
    rep.polar_histogram = attempt("polar_histogram", lambda: nearest_neighbor_polar(tset, cfg))
    rep.position_heatmap = attempt("position_heatmap", lambda: position_heatmap(tset, cfg, extent))
    return rep


# ---------------------------------------------------------------------------
# histogram distances
# ---------------------------------------------------------------------------

def histogram_distance(a, b) -> float:
    """Distance between two histograms with identical binning.

    1-D: earth mover's distance between the normalised histograms, treating
    each bin as a point mass at its centre. 2-D and polar: L1 distance between
    the normalised densities (equivalently, between bin probabilities).
    """
    if type(a) is not type(b) or not a.same_binning(b):
        raise BinningMismatch(f"cannot compare {type(a).__name__} and {type(b).__name__} with different bins")
    if not a.total > 0 or not b.total > 0:
        raise BinningMismatch("cannot normalise an empty histogram")
    pa = a.probabilities().reshape(-1)
    pb = b.probabilities().reshape(-1)
    if isinstance(a, Histogram1D):
        cdf_gap = np.cumsum(pa - pb)[:-1]
        return float(np.sum(np.abs(cdf_gap) * np.diff(a.centers)))
    return float(np.sum(np.abs(pa - pb)))


# ---------------------------------------------------------------------------
# comparison table
# ---------------------------------------------------------------------------

@dataclass
class ComparisonRow:
    metric: str
    scene_id: str
    gt: float | None
    values: dict[str, float | None]
    deltas: dict[str, float | None]
    closest: str | None
    partial: bool = False


@dataclass
class ComparisonTable:
    """Rows of (metric, scene) with one value per candidate.

    ``closest`` names the candidate with the smallest absolute difference from
    ground truth; on exact ties the earliest candidate wins. A row is
    ``partial`` when any value (GT or candidate) is missing; missing candidates
    are left out of the argmin.
    """

    candidates: list[str]
    rows: list[ComparisonRow]
    distances: dict[str, dict[str, dict[str, float | str]]] = field(default_factory=dict)

    def row(self, metric: str, scene_id: str) -> ComparisonRow:
        for r in self.rows:
            if r.metric == metric and r.scene_id == scene_id:
                return r
        raise KeyError((metric, scene_id))

    def closest_pattern(self) -> dict[tuple[str, str], str | None]:
        return {(r.metric, r.scene_id): r.closest for r in self.rows}


def _finite(v) -> bool:
    return v is not None and math.isfinite(v)


def compare_reports(gt: SceneReport, candidates: Sequence[SceneReport]) -> ComparisonTable:
    if not candidates:
        raise EmptyCandidates("need at least one candidate report")
    for c in candidates:
        if c.scene_id != gt.scene_id:
            raise SceneMismatch(f"candidate {c.label!r} is scene {c.scene_id!r}, ground truth is {gt.scene_id!r}")
    labels = [c.label for c in candidates]
    if len(set(labels)) != len(labels):
        raise ValueError(f"candidate labels must be unique, got {labels}")

    rows = []
    for key, _ in STATISTICS:
        g = gt.statistic(key)
        values = {c.label: c.statistic(key) for c in candidates}
        deltas: dict[str, float | None] = {}
        closest, best = None, math.inf
        for lab, v in values.items():
            if _finite(g) and _finite(v):
                d = abs(v - g)
                deltas[lab] = d
                if d < best:
                    closest, best = lab, d
            else:
                deltas[lab] = None
        partial = not _finite(g) or any(not _finite(v) for v in values.values())
        rows.append(ComparisonRow(key, gt.scene_id, g, values, deltas, closest, partial))

    distances: dict[str, dict[str, float | str]] = {}
    for c in candidates:
        entry: dict[str, float | str] = {}
        for name, attr in DISTRIBUTIONS:
            ha, hb = getattr(gt, attr), getattr(c, attr)
            if ha is None or hb is None:
                entry[name] = "Missing"
                continue
            try:
                entry[name] = histogram_distance(ha, hb)
            except BinningMismatch as e:
                entry[name] = e.code
        distances[c.label] = entry
    return ComparisonTable(labels, rows, {gt.scene_id: distances})


def merge_tables(tables: Sequence[ComparisonTable]) -> ComparisonTable:
    """Stack per-scene tables (same candidates, same order) into one."""
    if not tables:
        raise EmptyCandidates("no tables to merge")
    labels = tables[0].candidates
    rows: list[ComparisonRow] = []
    distances: dict = {}
    for t in tables:
        if t.candidates != labels:
            raise ValueError("tables must share the same candidate list")
        rows.extend(t.rows)
        distances.update(t.distances)
    return ComparisonTable(list(labels), rows, distances)


def _fmt(v: float | None, digits: int) -> str:
    return "-" if not _finite(v) else f"{v:.{digits}f}"


def format_text_table(table: ComparisonTable, digits: int = 2) -> str:
    """Aligned plain-text table; the value closest to ground truth carries a ``*``."""
    header = ["Metric", "Scene", "GT"] + list(table.candidates)
    body = []
    for r in table.rows:
        cells = [STATISTIC_NAMES.get(r.metric, r.metric), r.scene_id, _fmt(r.gt, digits)]
        for lab in table.candidates:
            s = _fmt(r.values.get(lab), digits)
            cells.append(s + ("*" if lab == r.closest else " "))
        body.append(cells)
    widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
    lines = []
    for k, row in enumerate([header] + body):
        parts = [row[0].ljust(widths[0]), row[1].ljust(widths[1])]
        parts += [c.rjust(widths[i]) for i, c in enumerate(row[2:], start=2)]
        lines.append("  ".join(parts).rstrip())
        if k == 0:
            lines.append("-" * len(lines[0]))
    if any(r.partial for r in table.rows):
        lines.append("(- = metric unavailable; rows with gaps compare only the values present)")
    return "\n".join(lines) + "\n"


def format_csv(table: ComparisonTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["metric", "scene", "gt"]
        + list(table.candidates)
        + [f"{lab}_delta" for lab in table.candidates]
        + ["closest", "partial"]
    )
    for r in table.rows:
        def num(v):
            return "" if not _finite(v) else repr(float(v))

        w.writerow(
            [r.metric, r.scene_id, num(r.gt)]
            + [num(r.values.get(lab)) for lab in table.candidates]
            + [num(r.deltas.get(lab)) for lab in table.candidates]
            + [r.closest or "", "true" if r.partial else "false"]
        )
    return buf.getvalue()

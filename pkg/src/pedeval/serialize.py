"""Canonical JSON for trajectory sets, camera verdicts, scene reports and tables.

Output is deterministic: keys are emitted in a fixed order, floats use
Python's shortest round-trip repr, NaN becomes ``null``, and every document
ends with a newline. ``load_*(dump_*(x)) == x`` for every type here.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path

import numpy as np

from .camfilter import CameraLabel, CameraVerdict
from .compare import ClipCounts, ComparisonRow, ComparisonTable, MetricError, SceneReport
from .core import Trajectory, TrajectorySet
from .dynamics import FundamentalDiagram, GaussianFit, Histogram1D, Histogram2D, PolarHistogram
from .errors import SchemaError
from .ingest import CoverageReport

SCHEMA_VERSION = 1


def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _nums(a) -> list:
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        return [_num(v) for v in arr.tolist()]
    return [_nums(row) for row in arr]


def _arr(v) -> np.ndarray:
    def conv(x):
        if isinstance(x, list):
            return [conv(y) for y in x]
        return math.nan if x is None else float(x)

    return np.array(conv(v), dtype=np.float64)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def _loads(text: str, kind: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise SchemaError(f"{kind} document must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {doc.get('schema_version')!r} (expected {SCHEMA_VERSION})")
    return doc


def _need(doc: dict, key: str, kind: str):
    if key not in doc:
        raise SchemaError(f"{kind}: missing field {key!r}")
    return doc[key]


def write_text(path: str | os.PathLike, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# TrajectorySet: {schema_version, scene_id, fps, trajectories:[{id, samples:[[frame,x,y],...]}]}
# ---------------------------------------------------------------------------

def trajectory_set_to_dict(tset: TrajectorySet) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "scene_id": tset.scene_id,
        "fps": float(tset.fps),
        "trajectories": [
            {
                "id": t.pedestrian_id,
                "samples": [[f, x, y] for f, (x, y) in zip(t.frames.tolist(), t.xy.tolist())],
            }
            for t in tset
        ],
    }


def trajectory_set_from_dict(doc: dict) -> TrajectorySet:
    kind = "trajectory set"
    try:
        trajs = []
        for entry in _need(doc, "trajectories", kind):
            samples = _need(entry, "samples", kind)
            if not samples:
                raise SchemaError(f"{kind}: trajectory {entry.get('id')!r} has no samples")
            frames = [int(s[0]) for s in samples]
            if any(float(s[0]) != f for s, f in zip(samples, frames)):
                raise SchemaError(f"{kind}: frame indices must be integers")
            xy = [(float(s[1]), float(s[2])) for s in samples]
            if not all(math.isfinite(v) for p in xy for v in p):
                raise SchemaError(f"{kind}: non-finite position")
            trajs.append(Trajectory(int(_need(entry, "id", kind)), frames, xy))
        return TrajectorySet(str(_need(doc, "scene_id", kind)), float(_need(doc, "fps", kind)), tuple(trajs))
    except SchemaError:
        raise
    except (TypeError, ValueError, IndexError, KeyError, AttributeError) as e:
        raise SchemaError(f"{kind}: {e}") from None


def dump_trajectory_set(tset: TrajectorySet) -> str:
    return dumps(trajectory_set_to_dict(tset))


def load_trajectory_set(text: str) -> TrajectorySet:
    return trajectory_set_from_dict(_loads(text, "trajectory set"))


# ---------------------------------------------------------------------------
# CameraVerdict
# ---------------------------------------------------------------------------

def verdict_to_dict(v: CameraVerdict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "camera_verdict",
        "label": v.label.value,
        "moving_feature_fraction": float(v.moving_feature_fraction),
        "features_tracked": v.features_tracked,
        "features_moving": v.features_moving,
        "pairs_evaluated": v.pairs_evaluated,
        "sampled_frames": list(v.sampled_frames),
    }


def verdict_from_dict(doc: dict) -> CameraVerdict:
    kind = "camera verdict"
    try:
        return CameraVerdict(
            CameraLabel(_need(doc, "label", kind)),
            float(_need(doc, "moving_feature_fraction", kind)),
            int(_need(doc, "features_tracked", kind)),
            int(_need(doc, "pairs_evaluated", kind)),
            int(doc.get("features_moving", 0)),
            tuple(int(i) for i in doc.get("sampled_frames", [])),
        )
    except (TypeError, ValueError) as e:
        raise SchemaError(f"{kind}: {e}") from None


def dump_verdict(v: CameraVerdict) -> str:
    return dumps(verdict_to_dict(v))


def load_verdict(text: str) -> CameraVerdict:
    return verdict_from_dict(_loads(text, "camera verdict"))


# ---------------------------------------------------------------------------
# SceneReport
# ---------------------------------------------------------------------------

def _hist1d(h: Histogram1D) -> dict:
    return {"edges": _nums(h.edges), "counts": _nums(h.counts), "normalized": h.normalized}


def _hist2d(h: Histogram2D) -> dict:
    return {"x_edges": _nums(h.x_edges), "y_edges": _nums(h.y_edges), "counts": _nums(h.counts),
            "normalized": h.normalized}


def _polar(h: PolarHistogram) -> dict:
    return {"r_edges": _nums(h.r_edges), "theta_edges": _nums(h.theta_edges), "counts": _nums(h.counts),
            "normalized": h.normalized}


def _fd(fd: FundamentalDiagram) -> dict:
    return {
        "bin_edges": _nums(fd.bin_edges),
        "mean_speed": _nums(fd.mean_speed),
        "counts": _nums(fd.counts),
        "density_samples": _nums(fd.density_samples),
        "speed_samples": _nums(fd.speed_samples),
    }


def report_to_dict(rep: SceneReport) -> dict:
    def opt(value, fn):
        return None if value is None else fn(value)

    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "scene_report",
        "scene_id": rep.scene_id,
        "label": rep.label,
        "statistics": {
            "stationary_pct": _num(rep.stationary_pct),
            "avg_speed": _num(rep.avg_speed),
            "dist_traveled": _num(rep.dist_traveled),
            "passing_dist": _num(rep.passing_dist),
        },
        "primary_axis": opt(rep.primary_axis, lambda a: [_num(a[0]), _num(a[1])]),
        "velocity_histogram": opt(rep.velocity_histogram, _hist1d),
        "gaussian_fit": opt(rep.gaussian_fit, lambda g: {"mean": _num(g.mean), "std": _num(g.std),
                                                        "sample_count": g.sample_count}),
        "fundamental_diagram": opt(rep.fundamental_diagram, _fd),
        "polar_histogram": opt(rep.polar_histogram, _polar),
        "position_heatmap": opt(rep.position_heatmap, _hist2d),
        "coverage": opt(rep.coverage, lambda c: {"scene_id": c.scene_id, "detection_count": c.detection_count,
                                                "threshold": c.threshold, "satisfied": c.satisfied}),
        "clips": {"total": rep.clips.total, "static": rep.clips.static, "moving": rep.clips.moving,
                  "indeterminate": rep.clips.indeterminate},
        "errors": {k: {"error": e.error, "message": e.message} for k, e in sorted(rep.errors.items())},
    }


def report_from_dict(doc: dict) -> SceneReport:
    kind = "scene report"
    try:
        stats = _need(doc, "statistics", kind)

        def opt(key, fn):
            v = doc.get(key)
            return None if v is None else fn(v)

        def stat(key):
            v = stats.get(key)
            return None if v is None else float(v)

        return SceneReport(
            scene_id=str(_need(doc, "scene_id", kind)),
            label=str(doc.get("label", "")),
            stationary_pct=stat("stationary_pct"),
            avg_speed=stat("avg_speed"),
            dist_traveled=stat("dist_traveled"),
            passing_dist=stat("passing_dist"),
            primary_axis=opt("primary_axis", lambda a: (float(a[0]), float(a[1]))),
            velocity_histogram=opt("velocity_histogram", lambda h: Histogram1D(
                _arr(h["edges"]), _arr(h["counts"]), bool(h.get("normalized", False)))),
            gaussian_fit=opt("gaussian_fit", lambda g: GaussianFit(float(g["mean"]), float(g["std"]),
                                                                   int(g["sample_count"]))),
            fundamental_diagram=opt("fundamental_diagram", lambda f: FundamentalDiagram(
                _arr(f["bin_edges"]), _arr(f["mean_speed"]), _arr(f["counts"]),
                _arr(f.get("density_samples", [])), _arr(f.get("speed_samples", [])))),
            polar_histogram=opt("polar_histogram", lambda h: PolarHistogram(
                _arr(h["r_edges"]), _arr(h["theta_edges"]), _arr(h["counts"]), bool(h.get("normalized", False)))),
            position_heatmap=opt("position_heatmap", lambda h: Histogram2D(
                _arr(h["x_edges"]), _arr(h["y_edges"]), _arr(h["counts"]), bool(h.get("normalized", False)))),
            coverage=opt("coverage", lambda c: CoverageReport(str(c["scene_id"]), int(c["detection_count"]),
                                                              int(c["threshold"]), bool(c["satisfied"]))),
            clips=ClipCounts(**{k: int(v) for k, v in doc.get("clips", {}).items()}),
            errors={k: MetricError(str(e["error"]), str(e.get("message", "")))
                    for k, e in doc.get("errors", {}).items()},
        )
    except SchemaError:
        raise
    except (TypeError, ValueError, KeyError, IndexError, AttributeError) as e:
        raise SchemaError(f"{kind}: {e}") from None


def dump_report(rep: SceneReport) -> str:
    return dumps(report_to_dict(rep))


def load_report(text: str) -> SceneReport:
    return report_from_dict(_loads(text, "scene report"))


# ---------------------------------------------------------------------------
# ComparisonTable
# ---------------------------------------------------------------------------

def _dist_value(v):
    return v if isinstance(v, str) else _num(v)


def table_to_dict(t: ComparisonTable) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "comparison_table",
        "candidates": list(t.candidates),
        "rows": [
            {
                "metric": r.metric,
                "scene_id": r.scene_id,
                "gt": _num(r.gt),
                "values": {lab: _num(r.values.get(lab)) for lab in t.candidates},
                "deltas": {lab: _num(r.deltas.get(lab)) for lab in t.candidates},
                "closest": r.closest,
                "partial": r.partial,
            }
            for r in t.rows
        ],
        "distances": {
            scene: {lab: {k: _dist_value(v) for k, v in d.items()} for lab, d in per.items()}
            for scene, per in t.distances.items()
        },
    }


def table_from_dict(doc: dict) -> ComparisonTable:
    kind = "comparison table"
    try:
        labels = [str(c) for c in _need(doc, "candidates", kind)]

        def num(v):
            return None if v is None else float(v)

        rows = [
            ComparisonRow(
                str(r["metric"]), str(r["scene_id"]), num(r["gt"]),
                {k: num(v) for k, v in r["values"].items()},
                {k: num(v) for k, v in r["deltas"].items()},
                r.get("closest"), bool(r.get("partial", False)),
            )
            for r in _need(doc, "rows", kind)
        ]
        distances = {
            scene: {lab: {k: (v if isinstance(v, str) else num(v)) for k, v in d.items()}
                    for lab, d in per.items()}
            for scene, per in doc.get("distances", {}).items()
        }
        return ComparisonTable(labels, rows, distances)
    except (TypeError, ValueError, KeyError, AttributeError) as e:
        raise SchemaError(f"{kind}: {e}") from None


def dump_table(t: ComparisonTable) -> str:
    return dumps(table_to_dict(t))


def load_table(text: str) -> ComparisonTable:
    return table_from_dict(_loads(text, "comparison table"))


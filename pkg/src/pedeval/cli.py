"""``pedeval`` command-line entry point."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .camfilter import CameraLabel, CameraMotionConfig, CameraVerdict, classify_camera
from .compare import ClipCounts, SceneReport, compare_reports, format_csv, format_text_table, merge_tables, scene_report
from .core import SceneCalibration
from .dynamics import DynamicsConfig, bounding_extent
from .errors import PedevalError, SceneMismatch, SequenceTooShort
from .ingest import (
    DEFAULT_COVERAGE_THRESHOLD,
    load_frames,
    parse_ethucy,
    parse_homography,
    parse_mot,
    tracks_from_detections,
    validate_coverage,
)
from .serialize import (
    dump_report,
    dump_table,
    dump_trajectory_set,
    dump_verdict,
    dumps,
    load_report,
    load_trajectory_set,
    load_verdict,
    write_text,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_COVERAGE = 3
EXIT_MOVING = 4
EXIT_INDETERMINATE = 5

EXIT_CODES_HELP = """\
exit codes:
  0  success (camera-check: static camera)
  2  input error (unreadable/malformed file, schema error, scene mismatch)
  3  coverage below threshold (ingest --require-coverage)
  4  camera-check: moving camera
  5  camera-check: indeterminate (too few features or frames)
"""

# (fps, frames per clip) used when generating the evaluated clips
CLIP_PRESETS = {
    "wan2.1": (16.0, 81),
    "cogvideox1.5": (16.0, 81),
    "hunyuanvideo": (25.0, 129),
}


class _InputError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"pedeval: error: {msg}", file=sys.stderr)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise _InputError(f"{path}: {e}") from None


def _fps(args) -> float:
    if args.preset:
        return CLIP_PRESETS[args.preset][0]
    return args.fps


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------

def cmd_ingest(args) -> int:
    fps = _fps(args)
    src = Path(args.detections)
    if not src.is_file():
        raise _InputError(f"{src}: no such file")
    if args.format == "mot":
        if not args.homography:
            raise _InputError("--homography is required for --format mot")
        hpath = Path(args.homography)
        if not hpath.is_file():
            raise _InputError(f"{hpath}: no such file")
        H = parse_homography(hpath)
        calib = SceneCalibration(H, fps, args.scene_id or src.stem)
        tset = tracks_from_detections(parse_mot(src), calib)
    else:
        tset = parse_ethucy(src, fps, args.scene_id or src.stem)
    write_text(args.out, dump_trajectory_set(tset))
    cov = validate_coverage(tset, args.coverage_threshold)
    print(dumps({
        "scene_id": cov.scene_id,
        "detection_count": cov.detection_count,
        "threshold": cov.threshold,
        "satisfied": cov.satisfied,
    }), end="")
    if args.require_coverage and not cov.satisfied:
        _err(f"coverage {cov.detection_count} < {cov.threshold} detections for scene {cov.scene_id!r}")
        return EXIT_COVERAGE
    return EXIT_OK


# ---------------------------------------------------------------------------
# camera-check
# ---------------------------------------------------------------------------

def _camera_cfg(args) -> CameraMotionConfig:
    return CameraMotionConfig(
        sample_hz=args.sample_hz,
        disp_thresh_px=args.disp_thresh,
        moving_frac=args.moving_frac,
        max_features=args.max_features,
        quality_level=args.quality_level,
        min_corner_distance_px=args.min_distance,
        lk_window=args.lk_window,
        pyramid_levels=args.pyramid_levels,
        lk_max_iters=args.lk_max_iters,
        lk_epsilon=args.lk_epsilon,
        min_valid_features=args.min_valid_features,
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


def cmd_camera_check(args) -> int:
    cfg = _camera_cfg(args)
    frames_dir = Path(args.frames)
    if not frames_dir.is_dir():
        raise _InputError(f"{frames_dir}: not a directory")
    seq = load_frames(frames_dir, _fps(args))
    try:
        verdict = classify_camera(seq, cfg)
    except SequenceTooShort as e:
        _err(f"SequenceTooShort: {e}")
        verdict = CameraVerdict(CameraLabel.INDETERMINATE, 0.0, 0, 0)
    _emit(dump_verdict(verdict), args.out)
    return {
        CameraLabel.STATIC: EXIT_OK,
        CameraLabel.MOVING: EXIT_MOVING,
        CameraLabel.INDETERMINATE: EXIT_INDETERMINATE,
    }[verdict.label]


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def _dynamics_cfg(args) -> DynamicsConfig:
    return DynamicsConfig(
        stationary_thresh_m=args.stationary_thresh,
        passing_radius_m=args.passing_radius,
        heatmap_bin_m=args.heatmap_bin,
        fd_density_bins=args.fd_bins,
        polar_r_max_m=args.polar_r_max,
        polar_r_bins=args.polar_r_bins,
        polar_theta_bins=args.polar_theta_bins,
        velocity_hist_bins=args.velocity_bins,
        velocity_range_mps=tuple(args.velocity_range),
        min_speed_for_heading_mps=args.min_heading_speed,
        velocity_smoothing=args.smoothing,
        boundary_margin_m=args.boundary_margin,
        passing_mutual_nn=not args.no_mutual_nn,
        passing_require_approach=not args.no_approach,
    )


def cmd_metrics(args) -> int:
    cfg = _dynamics_cfg(args)
    tset = load_trajectory_set(_read(args.trajectories))
    extent = None
    if args.extent:
        extent = tuple(args.extent)
    elif args.extent_from:
        extent = bounding_extent(load_trajectory_set(_read(args.extent_from)))
    labels = [load_verdict(_read(p)).label for p in args.verdict or []]
    rep = scene_report(
        tset, cfg, args.label,
        extent=extent,
        clips=ClipCounts.from_labels(labels),
        coverage_threshold=args.coverage_threshold,
    )
    write_text(args.out, dump_report(rep))
    if args.svg:
        from .plotting import render_report_figures

        for p in render_report_figures(rep, args.svg, "svg"):
            print(p)
    return EXIT_OK


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

def _split_candidate(spec: str) -> tuple[str | None, str]:
    if "=" in spec:
        label, path = spec.split("=", 1)
        return label, path
    return None, spec


def cmd_compare(args) -> int:
    gts = [load_report(_read(p)) for p in args.gt]
    scenes = [g.scene_id for g in gts]
    if len(set(scenes)) != len(scenes):
        raise _InputError(f"duplicate ground-truth scenes: {scenes}")
    labels: list[str] = []
    by_scene: dict[tuple[str, str], SceneReport] = {}
    for spec in args.candidate:
        label, path = _split_candidate(spec)
        rep = load_report(_read(path))
        if label:
            rep.label = label
        if not rep.label:
            raise _InputError(f"{path}: candidate needs a label (use LABEL=PATH)")
        if rep.scene_id not in scenes:
            raise SceneMismatch(f"candidate {rep.label!r} ({path}) is scene {rep.scene_id!r}; "
                                f"ground truth covers {scenes}")
        if (rep.scene_id, rep.label) in by_scene:
            raise _InputError(f"two candidates labelled {rep.label!r} for scene {rep.scene_id!r}")
        by_scene[(rep.scene_id, rep.label)] = rep
        if rep.label not in labels:
            labels.append(rep.label)
    tables = []
    for g in gts:
        cands = [by_scene.get((g.scene_id, lab), SceneReport(g.scene_id, lab)) for lab in labels]
        tables.append(compare_reports(g, cands))
    table = merge_tables(tables)

    stem = Path(args.out)
    if stem.suffix.lower() in (".json", ".txt", ".csv"):
        stem = stem.with_suffix("")
    stem.parent.mkdir(parents=True, exist_ok=True)
    text = format_text_table(table, args.digits)
    write_text(stem.with_suffix(".json"), dump_table(table))
    write_text(stem.with_suffix(".txt"), text)
    if args.csv:
        write_text(stem.with_suffix(".csv"), format_csv(table))
    sys.stdout.write(text)
    return EXIT_OK


def cmd_version(args) -> int:
    print(f"pedeval {__version__}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    p = argparse.ArgumentParser(
        prog="pedeval",
        description="Evaluate pedestrian trajectories: ingest tracker output, reject moving-camera clips, "
                    "compute crowd-dynamics metrics, and compare candidates against ground truth.",
        epilog=EXIT_CODES_HELP,
        formatter_class=fmt,
    )
    sub = p.add_subparsers(dest="command", required=True)

    def fps_opts(sp):
        sp.add_argument("--fps", type=float, default=16.0, help="clip frame rate (default 16)")
        sp.add_argument("--preset", choices=sorted(CLIP_PRESETS),
                        help="take fps from a generator preset (overrides --fps)")

    sp = sub.add_parser("ingest", help="tracker output or annotations -> trajectory JSON",
                        epilog=EXIT_CODES_HELP, formatter_class=fmt)
    sp.add_argument("--format", choices=("mot", "ethucy"), default="mot")
    sp.add_argument("--detections", required=True, help="MOT csv or ETH/UCY annotation file")
    sp.add_argument("--homography", help="3x3 pixel->world homography (required for mot)")
    fps_opts(sp)
    sp.add_argument("--scene-id", help="scene label (default: input file stem)")
    sp.add_argument("--out", required=True, help="trajectory JSON to write")
    sp.add_argument("--coverage-threshold", type=int, default=DEFAULT_COVERAGE_THRESHOLD)
    sp.add_argument("--require-coverage", action="store_true", help="exit 3 when coverage is below threshold")
    sp.set_defaults(func=cmd_ingest)

    d = CameraMotionConfig()
    sp = sub.add_parser("camera-check", help="classify a clip (directory of P5 PGM frames) as static/moving",
                        epilog=EXIT_CODES_HELP, formatter_class=fmt)
    sp.add_argument("--frames", required=True, help="directory of binary PGM frames")
    fps_opts(sp)
    sp.add_argument("--sample-hz", type=float, default=d.sample_hz)
    sp.add_argument("--disp-thresh", type=float, default=d.disp_thresh_px, help="pixels")
    sp.add_argument("--moving-frac", type=float, default=d.moving_frac)
    sp.add_argument("--max-features", type=int, default=d.max_features)
    sp.add_argument("--quality-level", type=float, default=d.quality_level)
    sp.add_argument("--min-distance", type=float, default=d.min_corner_distance_px)
    sp.add_argument("--lk-window", type=int, default=d.lk_window)
    sp.add_argument("--pyramid-levels", type=int, default=d.pyramid_levels)
    sp.add_argument("--lk-max-iters", type=int, default=d.lk_max_iters)
    sp.add_argument("--lk-epsilon", type=float, default=d.lk_epsilon)
    sp.add_argument("--min-valid-features", type=int, default=d.min_valid_features)
    sp.add_argument("--out", help="verdict JSON to write (default: stdout)")
    sp.set_defaults(func=cmd_camera_check)

    c = DynamicsConfig()
    sp = sub.add_parser("metrics", help="trajectory JSON -> scene report JSON (+ SVG figures)",
                        epilog=EXIT_CODES_HELP, formatter_class=fmt)
    sp.add_argument("--trajectories", required=True)
    sp.add_argument("--label", default="", help="model/source label stored in the report")
    sp.add_argument("--out", required=True)
    sp.add_argument("--svg", metavar="DIR", help="also render the four figures as SVG into DIR")
    ext = sp.add_mutually_exclusive_group()
    ext.add_argument("--extent", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"),
                     help="heatmap extent in meters (default: the set's bounding box)")
    ext.add_argument("--extent-from", metavar="GT.json", help="use another trajectory file's bounding box")
    sp.add_argument("--verdict", action="append", metavar="V.json", help="camera verdicts to tally (repeatable)")
    sp.add_argument("--coverage-threshold", type=int, default=DEFAULT_COVERAGE_THRESHOLD)
    sp.add_argument("--stationary-thresh", type=float, default=c.stationary_thresh_m, help="meters")
    sp.add_argument("--passing-radius", type=float, default=c.passing_radius_m, help="meters")
    sp.add_argument("--heatmap-bin", type=float, default=c.heatmap_bin_m, help="meters")
    sp.add_argument("--fd-bins", type=int, default=c.fd_density_bins)
    sp.add_argument("--polar-r-max", type=float, default=c.polar_r_max_m)
    sp.add_argument("--polar-r-bins", type=int, default=c.polar_r_bins)
    sp.add_argument("--polar-theta-bins", type=int, default=c.polar_theta_bins)
    sp.add_argument("--velocity-bins", type=int, default=c.velocity_hist_bins)
    sp.add_argument("--velocity-range", type=float, nargs=2, default=list(c.velocity_range_mps),
                    metavar=("LO", "HI"))
    sp.add_argument("--min-heading-speed", type=float, default=c.min_speed_for_heading_mps)
    sp.add_argument("--smoothing", type=int, default=c.velocity_smoothing, help="odd moving-average window")
    sp.add_argument("--boundary-margin", type=float, default=c.boundary_margin_m)
    sp.add_argument("--no-mutual-nn", action="store_true", help="passing pairs need not be mutual neighbours")
    sp.add_argument("--no-approach", action="store_true", help="passing pairs need not close in")
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("compare", help="ground-truth vs candidate reports -> comparison table",
                        epilog=EXIT_CODES_HELP, formatter_class=fmt)
    sp.add_argument("--gt", required=True, action="append", help="ground-truth report (repeat per scene)")
    sp.add_argument("--candidate", required=True, action="append", metavar="LABEL=PATH")
    sp.add_argument("--out", required=True, help="output stem; writes STEM.json and STEM.txt")
    sp.add_argument("--csv", action="store_true", help="also write STEM.csv")
    sp.add_argument("--digits", type=int, default=2)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("version", help="print version")
    sp.set_defaults(func=cmd_version)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PedevalError, _InputError) as e:
        _err(str(e) if isinstance(e, _InputError) else f"{e.code}: {e}")
        return EXIT_INPUT
    except ValueError as e:
        _err(str(e))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

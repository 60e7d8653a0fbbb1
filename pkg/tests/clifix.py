"""Fixture inputs and the end-to-end command pipeline shared by the CLI tests."""

import numpy as np

from pedeval.cli import main
from pedeval.ingest import write_pgm
from synth import constant_sequence, pan_sequence, static_sequence

H_TEXT = "0.02 0 0\n0 0.02 0\n0 0 1\n"


def mot_lines(n_walkers=12, frames=90, seed=0):
    """Walkers crossing a 640x480 view, in MOT form (1-based frames)."""
    rng = np.random.default_rng(seed)
    lines = []
    for pid in range(1, n_walkers + 1):
        start = rng.uniform([50, 50], [590, 430])
        vel = rng.normal(0, 2.5, 2) if pid % 4 else np.zeros(2)
        f0 = int(rng.integers(1, 20))
        for f in range(f0, f0 + frames - 20):
            u, v = start + vel * (f - f0)
            lines.append(f"{f},{pid},{u - 10:.3f},{v - 40:.3f},20,40,0.9,-1,-1,-1")
    return lines


def write_frames(directory, seq):
    directory.mkdir(parents=True, exist_ok=True)
    for k, f in enumerate(seq.frames):
        write_pgm(directory / f"{k:05d}.pgm", f.pixels)
    return directory


def build_fixture_dir(d):
    """Homography, MOT detections and four PGM clips under ``d``."""
    d.mkdir(parents=True, exist_ok=True)
    (d / "H.txt").write_text(H_TEXT)
    (d / "scene.txt").write_text("\n".join(mot_lines()) + "\n")
    write_frames(d / "static", static_sequence(noise=2.0))
    write_frames(d / "pan", pan_sequence(px_per_frame=4.0))
    write_frames(d / "flat", constant_sequence())
    write_frames(d / "single", constant_sequence(n=1))
    return d


def pipeline(fixture_dir, out):
    """ingest -> camera-check -> metrics (GT and candidate) -> compare; returns exit codes."""
    out.mkdir(parents=True, exist_ok=True)
    codes = [
        main(["ingest", "--detections", str(fixture_dir / "scene.txt"), "--homography", str(fixture_dir / "H.txt"),
              "--scene-id", "demo", "--out", str(out / "gt.json")]),
        main(["ingest", "--detections", str(fixture_dir / "scene.txt"), "--homography", str(fixture_dir / "H.txt"),
              "--scene-id", "demo", "--fps", "25", "--out", str(out / "cand.json")]),
        main(["camera-check", "--frames", str(fixture_dir / "static"), "--out", str(out / "v.json")]),
        main(["metrics", "--trajectories", str(out / "gt.json"), "--out", str(out / "gt_r.json"),
              "--svg", str(out / "fig")]),
        main(["metrics", "--trajectories", str(out / "cand.json"), "--label", "cand",
              "--extent-from", str(out / "gt.json"), "--verdict", str(out / "v.json"),
              "--out", str(out / "cand_r.json"), "--svg", str(out / "fig")]),
        main(["compare", "--gt", str(out / "gt_r.json"), "--candidate", f"cand={out / 'cand_r.json'}",
              "--out", str(out / "table"), "--csv"]),
    ]
    return codes

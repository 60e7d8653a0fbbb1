import json
import subprocess
import sys
import time
import xml.etree.ElementTree as ET

import numpy as np
import pytest

import reftable
from clifix import H_TEXT, build_fixture_dir, mot_lines, pipeline
from pedeval.cli import main
from pedeval.compare import scene_report
from pedeval.plotting import FIGURE_NAMES
from pedeval.serialize import dump_report, load_report, load_trajectory_set


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    return build_fixture_dir(tmp_path_factory.mktemp("cli"))


def run(argv, capsys=None):
    code = main([str(a) for a in argv])
    out = capsys.readouterr() if capsys else None
    return code, out


# --- ingest -----------------------------------------------------------------

def test_ingest_mot(fixture_dir, tmp_path, capsys):
    out = tmp_path / "T.json"
    code, io = run(["ingest", "--format", "mot", "--detections", fixture_dir / "scene.txt",
                    "--homography", fixture_dir / "H.txt", "--fps", 16, "--out", out, "--scene-id", "demo"], capsys)
    assert code == 0
    tset = load_trajectory_set(out.read_text())
    n_lines = len(mot_lines())
    assert tset.sample_count == n_lines and tset.scene_id == "demo"
    cov = json.loads(io.out)
    assert cov == {"scene_id": "demo", "detection_count": n_lines, "threshold": 1000, "satisfied": n_lines >= 1000}


def test_ingest_malformed_line(tmp_path, capsys):
    lines = mot_lines()[:20]
    lines[16] = "17,1,2,3"
    (tmp_path / "bad.txt").write_text("\n".join(lines))
    (tmp_path / "H.txt").write_text(H_TEXT)
    code, io = run(["ingest", "--detections", tmp_path / "bad.txt", "--homography", tmp_path / "H.txt",
                    "--out", tmp_path / "T.json"], capsys)
    assert code == 2
    assert "line 17" in io.err


@pytest.mark.parametrize("n, expected", [(999, 3), (1000, 0)])
def test_ingest_coverage_gate(tmp_path, capsys, n, expected):
    lines = [f"{f},{1 + i // 100},{10 * (i % 7)},{5 * (i % 11)},4,6,1,-1,-1,-1"
             for i in range(n) for f in [i % 100 + 1]]
    (tmp_path / "d.txt").write_text("\n".join(lines))
    (tmp_path / "H.txt").write_text("1 0 0\n0 1 0\n0 0 1\n")
    code, _ = run(["ingest", "--detections", tmp_path / "d.txt", "--homography", tmp_path / "H.txt",
                   "--out", tmp_path / "T.json", "--require-coverage"], capsys)
    assert code == expected


def test_ingest_ethucy_and_missing_file(tmp_path, capsys):
    (tmp_path / "eth.txt").write_text("0 1 0.0 0.0\n10 1 1.0 0.0\n")
    code, _ = run(["ingest", "--format", "ethucy", "--detections", tmp_path / "eth.txt",
                   "--preset", "hunyuanvideo", "--out", tmp_path / "T.json"], capsys)
    assert code == 0
    assert load_trajectory_set((tmp_path / "T.json").read_text()).fps == 25.0
    code, _ = run(["ingest", "--detections", tmp_path / "nope.txt", "--homography", tmp_path / "nope",
                   "--out", tmp_path / "T.json"], capsys)
    assert code == 2


# --- camera-check -----------------------------------------------------------

@pytest.mark.parametrize("clip, code, label", [("static", 0, "Static"), ("pan", 4, "Moving"),
                                               ("flat", 5, "Indeterminate")])
def test_camera_check_exit_codes(fixture_dir, tmp_path, capsys, clip, code, label):
    out = tmp_path / "v.json"
    got, _ = run(["camera-check", "--frames", fixture_dir / clip, "--fps", 16, "--out", out], capsys)
    assert got == code
    assert json.loads(out.read_text())["label"] == label


def test_camera_check_single_frame(fixture_dir, capsys):
    code, io = run(["camera-check", "--frames", fixture_dir / "single"], capsys)
    assert code == 5
    assert "SequenceTooShort" in io.err
    assert json.loads(io.out)["label"] == "Indeterminate"


def test_camera_check_flags_reach_config(fixture_dir, capsys):
    # an absurdly high threshold turns the pan into a static clip
    code, _ = run(["camera-check", "--frames", fixture_dir / "pan", "--disp-thresh", 500], capsys)
    assert code == 0


def test_camera_check_bad_frames(tmp_path, capsys):
    (tmp_path / "a.pgm").write_bytes(b"P2\n2 2\n255\n0 0 0 0\n")
    code, io = run(["camera-check", "--frames", tmp_path], capsys)
    assert code == 2 and "FormatError" in io.err


# --- metrics ----------------------------------------------------------------

@pytest.fixture(scope="module")
def traj_file(fixture_dir):
    out = fixture_dir / "T.json"
    assert main(["ingest", "--detections", str(fixture_dir / "scene.txt"), "--homography",
                 str(fixture_dir / "H.txt"), "--out", str(out), "--scene-id", "demo"]) == 0
    return out


def test_metrics_matches_library(traj_file, tmp_path, capsys):
    out = tmp_path / "R.json"
    code, _ = run(["metrics", "--trajectories", traj_file, "--label", "wan", "--out", out], capsys)
    assert code == 0
    tset = load_trajectory_set(traj_file.read_text())
    assert load_report(out.read_text()) == scene_report(tset, label="wan")
    assert out.read_text() == dump_report(scene_report(tset, label="wan"))


def test_metrics_svg(traj_file, tmp_path, capsys):
    code, io = run(["metrics", "--trajectories", traj_file, "--label", "wan", "--out", tmp_path / "R.json",
                    "--svg", tmp_path / "fig"], capsys)
    assert code == 0
    files = sorted((tmp_path / "fig").iterdir())
    assert [f.name for f in files] == sorted(f"wan_{n}.svg" for n in FIGURE_NAMES)
    for f in files:
        root = ET.parse(f).getroot()
        assert root.tag.endswith("svg")
        assert "xlink:href=\"http" not in f.read_text()


def test_metrics_overrides_and_verdicts(traj_file, tmp_path, capsys):
    v = tmp_path / "v.json"
    v.write_text('{"schema_version": 1, "kind": "camera_verdict", "label": "Moving", '
                 '"moving_feature_fraction": 0.9, "features_tracked": 40, "pairs_evaluated": 9}\n')
    out = tmp_path / "R.json"
    code, _ = run(["metrics", "--trajectories", traj_file, "--out", out, "--stationary-thresh", 1000,
                   "--heatmap-bin", 2, "--verdict", v, "--verdict", v], capsys)
    assert code == 0
    rep = load_report(out.read_text())
    assert rep.stationary_pct == 100.0
    assert np.allclose(np.diff(rep.position_heatmap.x_edges), 2.0)
    assert (rep.clips.total, rep.clips.moving) == (2, 2)


def test_metrics_empty_and_bad_schema(tmp_path, capsys):
    (tmp_path / "e.json").write_text('{"schema_version": 1, "scene_id": "x", "fps": 16, "trajectories": []}')
    code, io = run(["metrics", "--trajectories", tmp_path / "e.json", "--out", tmp_path / "R.json"], capsys)
    assert code == 2 and "EmptySet" in io.err
    (tmp_path / "b.json").write_text('{"scene_id": 3}')
    code, _ = run(["metrics", "--trajectories", tmp_path / "b.json", "--out", tmp_path / "R.json"], capsys)
    assert code == 2


# --- compare ----------------------------------------------------------------

def write_reference_reports(directory):
    gts, cands = [], []
    for s in reftable.SCENES:
        p = directory / f"gt_{s}.json"
        p.write_text(dump_report(reftable.report("GT", s)))
        gts.append(p)
        for m in reftable.MODELS:
            q = directory / f"{m}_{s}.json"
            q.write_text(dump_report(reftable.report(m, s)))
            cands.append(f"{m}={q}")
    return gts, cands


def test_compare_reproduces_bold(tmp_path, capsys):
    gts, cands = write_reference_reports(tmp_path)
    argv = ["compare", "--out", tmp_path / "tbl", "--csv"]
    for g in gts:
        argv += ["--gt", g]
    for c in cands:
        argv += ["--candidate", c]
    code, io = run(argv, capsys)
    assert code == 0
    assert (tmp_path / "tbl.json").exists() and (tmp_path / "tbl.csv").exists()
    text = (tmp_path / "tbl.txt").read_text()
    assert io.out == text
    doc = json.loads((tmp_path / "tbl.json").read_text())
    pattern = {(r["metric"], r["scene_id"]): r["closest"] for r in doc["rows"]}
    assert pattern == reftable.expected_pattern()
    assert text.count("*") == 16


def test_compare_single_candidate(tmp_path, capsys):
    g = tmp_path / "gt.json"
    g.write_text(dump_report(reftable.report("GT", "ETH")))
    c = tmp_path / "c.json"
    c.write_text(dump_report(reftable.report("CVX", "ETH")))
    code, io = run(["compare", "--gt", g, "--candidate", f"cvx={c}", "--out", tmp_path / "t"], capsys)
    assert code == 0
    rows = json.loads((tmp_path / "t.json").read_text())["rows"]
    assert all(r["closest"] == "cvx" for r in rows)


def test_compare_scene_mismatch(tmp_path, capsys):
    g = tmp_path / "gt.json"
    g.write_text(dump_report(reftable.report("GT", "ETH")))
    c = tmp_path / "c.json"
    c.write_text(dump_report(reftable.report("Wan", "UNIV")))
    code, io = run(["compare", "--gt", g, "--candidate", f"wan={c}", "--out", tmp_path / "t"], capsys)
    assert code == 2 and "SceneMismatch" in io.err


# --- contract ---------------------------------------------------------------

def test_help_documents_exit_codes():
    out = subprocess.run([sys.executable, "-m", "pedeval", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for code in ("0", "2", "3", "4", "5"):
        assert f"  {code}  " in out.stdout


def test_version(capsys):
    code, io = run(["version"], capsys)
    assert code == 0 and io.out.startswith("pedeval ")


def test_pipeline_deterministic_and_fast(fixture_dir, tmp_path, capsys):
    t0 = time.perf_counter()
    assert pipeline(fixture_dir, tmp_path / "a") == [0, 0, 0, 0, 0, 0]
    elapsed = time.perf_counter() - t0
    assert pipeline(fixture_dir, tmp_path / "b") == [0, 0, 0, 0, 0, 0]
    capsys.readouterr()
    a = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    b = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*") if p.is_file())
    assert a == b and len(a) == 16
    for rel in a:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes(), rel
    assert elapsed < 10.0

"""Readers for tracker output, benchmark annotations, homographies and frames.

Frame-index convention: MOT files count frames from 1 (the MOTChallenge
convention); everything in memory counts from 0. The shift happens here and
only here. ETH/UCY annotation frame ids are kept as they appear on disk.
"""

from __future__ import annotations

import math
import os
import re
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Union

import numpy as np

from .core import (
    BoundingBox,
    Detection,
    SceneCalibration,
    Trajectory,
    TrajectorySet,
    ground_contact,
    project_many,
)
from .errors import (
    DegenerateProjection,
    DimensionMismatch,
    DuplicateSample,
    FormatError,
    InvalidBox,
    ParseError,
    SingularMatrix,
)

DEFAULT_COVERAGE_THRESHOLD = 1000

Source = Union[str, bytes, IO[str], IO[bytes], os.PathLike]


@dataclass(frozen=True)
class DetectionTable:
    detections: tuple[Detection, ...]
    source: str = ""

    def __len__(self) -> int:
        return len(self.detections)

    def __iter__(self):
        return iter(self.detections)


@dataclass(frozen=True)
class CoverageReport:
    scene_id: str
    detection_count: int
    threshold: int
    satisfied: bool


@dataclass(frozen=True, eq=False)
class GrayFrame:
    width: int
    height: int
    pixels: np.ndarray  # (height, width) uint8, row-major
    timestamp: float = 0.0

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.dtype != np.uint8 or px.shape != (self.height, self.width):
            raise DimensionMismatch(
                f"pixel buffer {px.shape}/{px.dtype} does not match {self.height}x{self.width} uint8"
            )


@dataclass(frozen=True)
class GrayFrameSequence:
    frames: tuple[GrayFrame, ...]
    fps: float

    def __post_init__(self):
        ts = [f.timestamp for f in self.frames]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("frame timestamps must be strictly increasing")
        sizes = {(f.width, f.height) for f in self.frames}
        if len(sizes) > 1:
            raise DimensionMismatch(f"frames differ in size: {sorted(sizes)}")

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def timestamps(self) -> np.ndarray:
        return np.array([f.timestamp for f in self.frames], dtype=np.float64)


def _read_text(src: Source) -> tuple[str, str]:
    """Return (text, label) for a path, raw string/bytes, or open stream."""
    label = ""
    if isinstance(src, (os.PathLike,)):
        label = os.fspath(src)
        data = Path(src).read_bytes()
    elif isinstance(src, (bytes, bytearray)):
        data = bytes(src)
    elif isinstance(src, str):
        return src, label
    else:
        label = getattr(src, "name", "") or ""
        data = src.read()
        if isinstance(data, str):
            return data, str(label)
    try:
        return data.decode("utf-8"), str(label)
    except UnicodeDecodeError as e:
        raise ParseError(f"input is not valid UTF-8 ({e.reason} at byte {e.start})", source=str(label) or None)


def _float(tok: str, what: str, lineno: int, label: str) -> float:
    try:
        val = float(tok)
    except ValueError:
        raise ParseError(f"{what}: {tok!r} is not a number", lineno, label or None) from None
    if not math.isfinite(val):
        raise ParseError(f"{what}: {tok!r} is not finite", lineno, label or None)
    return val


def _int(tok: str, what: str, lineno: int, label: str) -> int:
    val = _float(tok, what, lineno, label)
    if val != int(val):
        raise ParseError(f"{what}: {tok!r} is not an integer", lineno, label or None)
    return int(val)


# ---------------------------------------------------------------------------
# MOT
# ---------------------------------------------------------------------------

MOT_FIELDS = ("frame", "id", "bb_left", "bb_top", "bb_width", "bb_height", "conf", "x", "y", "z")


def parse_mot(src: Source) -> DetectionTable:
    """Parse MOTChallenge-style tracker output.

    Lines are ``frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z``. The
    world ``x,y,z`` tail may be omitted (7 fields) and so may ``conf`` (6
    fields); a missing or ``-1`` confidence reads as 1.0. Blank lines and lines
    starting with ``#`` are skipped.
    """
    text, label = _read_text(src)
    dets = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = [t.strip() for t in line.split(",")]
        if len(toks) not in (6, 7, 10):
            raise ParseError(f"expected 10 comma-separated fields, got {len(toks)}", lineno, label or None)
        frame = _int(toks[0], "frame", lineno, label)
        if frame < 1:
            raise ParseError(f"frame numbers start at 1, got {frame}", lineno, label or None)
        pid = _int(toks[1], "id", lineno, label)
        left, top, w, h = (_float(t, n, lineno, label) for t, n in zip(toks[2:6], MOT_FIELDS[2:6]))
        conf = 1.0
        if len(toks) >= 7 and toks[6] != "":
            conf = _float(toks[6], "conf", lineno, label)
            if conf == -1.0:
                conf = 1.0
            elif not 0.0 <= conf <= 1.0:
                raise ParseError(f"confidence {conf} outside [0, 1]", lineno, label or None)
        for tok, name in zip(toks[7:], MOT_FIELDS[7:]):
            _float(tok, name, lineno, label)
        if not (w > 0 and h > 0):
            raise InvalidBox(f"box size must be positive, got {w}x{h}", lineno, label or None)
        dets.append(Detection(frame - 1, pid, BoundingBox(left, top, w, h), conf))
    return DetectionTable(tuple(dets), label)


def format_mot(table: DetectionTable | Iterable[Detection]) -> str:
    """Inverse of :func:`parse_mot` (writes the 10-field form)."""
    out = []
    for d in table:
        b = d.bbox
        out.append(
            f"{d.frame_index + 1},{d.pedestrian_id},{b.left!r},{b.top!r},{b.width!r},{b.height!r},"
            f"{float(d.confidence)!r},-1,-1,-1"
        )
    return "".join(line + "\n" for line in out)


# ---------------------------------------------------------------------------
# ETH/UCY
# ---------------------------------------------------------------------------

def parse_ethucy(src: Source, fps: float = 25.0, scene_id: str = "scene") -> TrajectorySet:
    """Read the processed ETH/UCY annotation format ``frame_id ped_id x y``.

    Coordinates are already metric, so no homography is applied.
    """
    text, label = _read_text(src)
    rows: dict[int, list[tuple[int, float, float]]] = defaultdict(list)
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) != 4:
            raise ParseError(f"expected 4 whitespace-separated fields, got {len(toks)}", lineno, label or None)
        frame = _int(toks[0], "frame_id", lineno, label)
        pid = _int(toks[1], "ped_id", lineno, label)
        x = _float(toks[2], "x", lineno, label)
        y = _float(toks[3], "y", lineno, label)
        if (pid, frame) in seen:
            raise DuplicateSample(f"pedestrian {pid} appears twice in frame {frame}", lineno, label or None)
        seen.add((pid, frame))
        rows[pid].append((frame, x, y))
    trajs = []
    for pid in sorted(rows):
        samples = sorted(rows[pid], key=lambda r: r[0])
        trajs.append(Trajectory(pid, [s[0] for s in samples], [(s[1], s[2]) for s in samples]))
    return TrajectorySet(scene_id, fps, tuple(trajs))


# ---------------------------------------------------------------------------
# homography
# ---------------------------------------------------------------------------

def parse_homography(src: Source) -> np.ndarray:
    text, label = _read_text(src)
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.replace(",", " ").split()
        rows.append([_float(t, "homography entry", lineno, label) for t in toks])
    values = [v for r in rows for v in r]
    if len(values) != 9:
        raise ParseError(f"homography needs 9 numbers, found {len(values)}", source=label or None)
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        raise ParseError("homography must be 3 rows of 3 numbers", source=label or None)
    H = np.array(values, dtype=np.float64).reshape(3, 3)
    if abs(np.linalg.det(H)) < 1e-12:
        raise SingularMatrix("homography is singular (|det H| < 1e-12)")
    return H


# ---------------------------------------------------------------------------
# PGM frames
# ---------------------------------------------------------------------------

_PGM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def read_pgm(data: bytes, timestamp: float = 0.0, name: str = "") -> GrayFrame:
    """Decode one binary (P5) PGM with maxval 255."""
    pos = 0
    header = []
    for _ in range(4):
        m = _PGM_TOKEN.match(data, pos)
        if not m:
            raise FormatError(f"{name}: truncated PGM header")
        header.append(m.group(1))
        pos = m.end()
    magic = header[0]
    if magic != b"P5":
        raise FormatError(f"{name}: only binary PGM (P5) is supported, got {magic[:8]!r}")
    try:
        width, height, maxval = (int(t) for t in header[1:])
    except ValueError:
        raise FormatError(f"{name}: malformed PGM header") from None
    if maxval != 255:
        raise FormatError(f"{name}: maxval must be 255, got {maxval}")
    if width <= 0 or height <= 0:
        raise FormatError(f"{name}: bad PGM size {width}x{height}")
    pos += 1  # single whitespace byte after maxval
    body = data[pos:pos + width * height]
    if len(body) != width * height:
        raise FormatError(f"{name}: expected {width * height} pixel bytes, found {len(body)}")
    pixels = np.frombuffer(body, dtype=np.uint8).reshape(height, width).copy()
    return GrayFrame(width, height, pixels, timestamp)


def write_pgm(path: str | os.PathLike, pixels: np.ndarray) -> None:
    px = np.asarray(pixels)
    if px.dtype != np.uint8 or px.ndim != 2:
        raise ValueError("write_pgm needs a 2-D uint8 array")
    h, w = px.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(np.ascontiguousarray(px).tobytes())


def load_frames(directory: str | os.PathLike, fps: float) -> GrayFrameSequence:
    """Load every ``*.pgm`` in ``directory``; lexicographic order is temporal order.

    Video must be converted beforehand, e.g.
    ``ffmpeg -i clip.mp4 -pix_fmt gray frames/%05d.pgm``.
    """
    if not fps > 0:
        raise ValueError(f"fps must be positive, got {fps}")
    paths = sorted(p for p in Path(directory).iterdir() if p.suffix.lower() == ".pgm")
    frames = []
    for k, p in enumerate(paths):
        frame = read_pgm(p.read_bytes(), k / fps, p.name)
        if frames and (frame.width, frame.height) != (frames[0].width, frames[0].height):
            raise DimensionMismatch(
                f"{p.name} is {frame.width}x{frame.height}, expected {frames[0].width}x{frames[0].height}"
            )
        frames.append(frame)
    return GrayFrameSequence(tuple(frames), float(fps))


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def tracks_from_detections(table: DetectionTable, calib: SceneCalibration) -> TrajectorySet:
    """Ground-contact point of every box, projected to world, grouped by id."""
    by_id: dict[int, list[Detection]] = defaultdict(list)
    for det in table:
        by_id[det.pedestrian_id].append(det)
    trajs = []
    for pid in sorted(by_id):
        dets = sorted(by_id[pid], key=lambda d: d.frame_index)
        frames = [d.frame_index for d in dets]
        for a, b in zip(frames, frames[1:]):
            if a == b:
                raise DuplicateSample(f"pedestrian {pid} has two detections in frame {a + 1} (1-based)")
        uv = np.array([ground_contact(d.bbox) for d in dets], dtype=np.float64)
        try:
            xy = project_many(calib.homography, uv)
        except DegenerateProjection as e:
            raise DegenerateProjection(f"pedestrian {pid}: {e}") from None
        trajs.append(Trajectory(pid, frames, xy))
    return TrajectorySet(calib.scene_id, calib.fps, tuple(trajs))


def validate_coverage(tset: TrajectorySet, threshold: int = DEFAULT_COVERAGE_THRESHOLD) -> CoverageReport:
    count = tset.sample_count
    return CoverageReport(tset.scene_id, count, int(threshold), count >= threshold)

"""Static/moving camera classification from sparse optical flow.

Reference frames are sampled at ``sample_hz``; on each one, Shi-Tomasi corners
are detected and tracked to the next sampled frame with coarse-to-fine
(pyramidal) Lucas-Kanade. A clip is "moving" when the share of tracked
features that travelled more than ``disp_thresh_px`` reaches ``moving_frac``.

All image arithmetic uses raw intensities in float64. Spatial gradients are
Sobel responses divided by 8, i.e. intensity units per pixel.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import PixelPoint
from .errors import DimensionMismatch, FrameTooSmall, SequenceTooShort
from .ingest import GrayFrame, GrayFrameSequence


@dataclass(frozen=True)
class CameraMotionConfig:
    sample_hz: float = 2.0
    disp_thresh_px: float = 10.0
    moving_frac: float = 0.85
    max_features: int = 200
    quality_level: float = 0.01
    min_corner_distance_px: float = 7.0
    lk_window: int = 21
    pyramid_levels: int = 3
    lk_max_iters: int = 30
    lk_epsilon: float = 0.01
    min_valid_features: int = 10

    def __post_init__(self):
        if not 0 < self.moving_frac <= 1:
            raise ValueError("moving_frac must be in (0, 1]")
        if not self.disp_thresh_px > 0:
            raise ValueError("disp_thresh_px must be positive")
        if not self.sample_hz > 0:
            raise ValueError("sample_hz must be positive")
        if self.pyramid_levels < 1:
            raise ValueError("pyramid_levels must be >= 1")
        if self.lk_window < 3 or self.lk_window % 2 == 0:
            raise ValueError("lk_window must be odd and >= 3")

    @property
    def half_window(self) -> int:
        return self.lk_window // 2


class FlowStatus(enum.Enum):
    TRACKED = "Tracked"
    LOST = "Lost"


class CameraLabel(enum.Enum):
    STATIC = "Static"
    MOVING = "Moving"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class FeaturePoint:
    position: PixelPoint
    response: float


@dataclass(frozen=True, eq=False)
class FlowResult:
    start: np.ndarray  # (n, 2) u, v
    end: np.ndarray  # (n, 2)
    status: tuple[FlowStatus, ...]

    @property
    def displacement(self) -> np.ndarray:
        return self.end - self.start

    @property
    def tracked(self) -> np.ndarray:
        return np.array([s is FlowStatus.TRACKED for s in self.status], dtype=bool)

    def __len__(self) -> int:
        return len(self.status)


@dataclass(frozen=True)
class CameraVerdict:
    label: CameraLabel
    moving_feature_fraction: float
    features_tracked: int
    pairs_evaluated: int
    features_moving: int = 0
    sampled_frames: tuple[int, ...] = field(default_factory=tuple)


# ---------------------------------------------------------------------------
# image filters
# ---------------------------------------------------------------------------

def _as_float(frame: GrayFrame | np.ndarray) -> np.ndarray:
    px = frame.pixels if isinstance(frame, GrayFrame) else frame
    return np.asarray(px, dtype=np.float64)


def sobel_gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sobel x/y derivatives (scaled by 1/8) with replicated borders."""
    p = np.pad(img, 1, mode="edge")
    # rows: 1-2-1 smoothing, columns: central difference (and transposed)
    smooth_rows = p[:-2, :] + 2.0 * p[1:-1, :] + p[2:, :]
    gx = smooth_rows[:, 2:] - smooth_rows[:, :-2]
    smooth_cols = p[:, :-2] + 2.0 * p[:, 1:-1] + p[:, 2:]
    gy = smooth_cols[2:, :] - smooth_cols[:-2, :]
    return gx / 8.0, gy / 8.0


def _blur121(img: np.ndarray) -> np.ndarray:
    p = np.pad(img, 1, mode="edge")
    r = (p[:-2, :] + 2.0 * p[1:-1, :] + p[2:, :]) / 4.0
    return (r[:, :-2] + 2.0 * r[:, 1:-1] + r[:, 2:]) / 4.0


def structure_tensor(img: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-pixel (a, b, c) of [[a, b], [b, c]] with a 3x3 Gaussian window."""
    gx, gy = sobel_gradients(img)
    return _blur121(gx * gx), _blur121(gx * gy), _blur121(gy * gy)


def min_eigenvalue(a, b, c):
    """Smaller eigenvalue of the symmetric 2x2 matrix [[a, b], [b, c]]."""
    return (a + c) / 2.0 - np.sqrt(((a - c) / 2.0) ** 2 + b * b)


def _binomial_downsample(img: np.ndarray) -> np.ndarray:
    k = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0
    p = np.pad(img, 2, mode="edge")
    r = sum(k[i] * p[i:i + img.shape[0], :] for i in range(5))
    s = sum(k[i] * r[:, i:i + img.shape[1]] for i in range(5))
    return s[::2, ::2]


def build_pyramid(img: np.ndarray, levels: int) -> list[np.ndarray]:
    pyr = [img]
    for _ in range(levels - 1):
        if min(pyr[-1].shape) < 2:
            break
        pyr.append(_binomial_downsample(pyr[-1]))
    return pyr


# ---------------------------------------------------------------------------
# Shi-Tomasi
# ---------------------------------------------------------------------------

def corner_response(frame: GrayFrame | np.ndarray) -> np.ndarray:
    a, b, c = structure_tensor(_as_float(frame))
    return np.maximum(min_eigenvalue(a, b, c), 0.0)


def shi_tomasi(frame: GrayFrame | np.ndarray, cfg: CameraMotionConfig = CameraMotionConfig()) -> list[FeaturePoint]:
    """Strongest min-eigenvalue corners, spaced at least ``min_corner_distance_px`` apart.

    Only pixels at least half an LK window away from every border are
    candidates, so each feature can be tracked without leaving the frame.
    """
    img = _as_float(frame)
    h, w = img.shape
    m = cfg.half_window
    if h < 2 * m or w < 2 * m:
        raise FrameTooSmall(f"frame {w}x{h} is smaller than twice the half-window ({m})")
    resp = corner_response(img)
    inner = np.zeros_like(resp, dtype=bool)
    inner[m:h - m, m:w - m] = True
    vals = np.where(inner, resp, 0.0)
    top = vals.max() if vals.size else 0.0
    if not top > 0:
        return []
    rows, cols = np.nonzero(vals >= cfg.quality_level * top)
    scores = vals[rows, cols]
    # descending response; ties broken by (row, col) so the result never depends on scan order
    order = np.lexsort((cols, rows, -scores))

    r = cfg.min_corner_distance_px
    ri = int(np.ceil(r))
    dy, dx = np.mgrid[-ri:ri + 1, -ri:ri + 1]
    # strictly closer than r is suppressed; exactly r apart is allowed
    disk = (dx * dx + dy * dy) < r * r
    blocked = np.zeros((h + 2 * ri, w + 2 * ri), dtype=bool)

    out: list[FeaturePoint] = []
    for k in order:
        y, x = int(rows[k]), int(cols[k])
        if blocked[y + ri, x + ri]:
            continue
        out.append(FeaturePoint(PixelPoint(float(x), float(y)), float(scores[k])))
        if len(out) >= cfg.max_features:
            break
        if r > 0:
            win = blocked[y:y + 2 * ri + 1, x:x + 2 * ri + 1]
            win |= disk
    return out


# ---------------------------------------------------------------------------
# pyramidal Lucas-Kanade
# ---------------------------------------------------------------------------

def _bilinear(imgs, x: np.ndarray, y: np.ndarray):
    """Sample one image (or a list sharing a shape) at float coordinates.

    Coordinates are clamped to the border. Returns an array, or a list of
    arrays when given a list.
    """
    single = isinstance(imgs, np.ndarray)
    stack = [imgs] if single else list(imgs)
    h, w = stack[0].shape
    x = np.clip(x, 0.0, w - 1.0)
    y = np.clip(y, 0.0, h - 1.0)
    x0 = np.floor(x)
    y0 = np.floor(y)
    fx = x - x0
    fy = y - y0
    x0 = x0.astype(np.intp)
    y0 = y0.astype(np.intp)
    i00 = y0 * w + x0
    i01 = i00 + (x0 < w - 1)
    step = np.where(y0 < h - 1, w, 0)
    i10 = i00 + step
    i11 = i01 + step
    w00 = (1.0 - fx) * (1.0 - fy)
    w01 = fx * (1.0 - fy)
    w10 = (1.0 - fx) * fy
    w11 = fx * fy
    out = []
    for img in stack:
        flat = img.ravel()
        out.append(flat[i00] * w00 + flat[i01] * w01 + flat[i10] * w10 + flat[i11] * w11)
    return out[0] if single else out


def _points_array(features) -> np.ndarray:
    if isinstance(features, np.ndarray):
        return np.asarray(features, dtype=np.float64).reshape(-1, 2)
    pts = []
    for f in features:
        p = f.position if isinstance(f, FeaturePoint) else f
        pts.append((float(p[0]), float(p[1])))
    return np.array(pts, dtype=np.float64).reshape(-1, 2)


def _window_inside(pts: np.ndarray, half: int, w: int, h: int) -> np.ndarray:
    return (
        (pts[:, 0] - half >= 0)
        & (pts[:, 0] + half <= w - 1)
        & (pts[:, 1] - half >= 0)
        & (pts[:, 1] + half <= h - 1)
    )


def pyramidal_lk(
    frame_a: GrayFrame | np.ndarray,
    frame_b: GrayFrame | np.ndarray,
    features,
    cfg: CameraMotionConfig = CameraMotionConfig(),
) -> FlowResult:
    """Track ``features`` from ``frame_a`` to ``frame_b``.

    Coarse-to-fine iterative Lucas-Kanade: at each pyramid level the 2x2
    normal equations are solved over the window with bilinear sampling until
    the update drops below ``lk_epsilon`` or ``lk_max_iters`` is reached, and
    the estimate is doubled on the way down. All features are processed
    together as arrays.

    A feature is Lost when its window does not fit inside frame A at the start
    or inside frame B at the end, when the base-level gradient matrix is
    ill-conditioned (min eigenvalue below 1e-4 times the window area), or when
    the estimate is not finite. Coarse levels sample with clamped borders and
    skip the update for ill-conditioned windows instead of failing.
    """
    A = _as_float(frame_a)
    B = _as_float(frame_b)
    if A.shape != B.shape:
        raise DimensionMismatch(f"frame sizes differ: {A.shape[::-1]} vs {B.shape[::-1]}")
    pts = _points_array(features)
    n = len(pts)
    h, w = A.shape
    if n == 0:
        empty = np.empty((0, 2))
        return FlowResult(empty, empty.copy(), ())

    half = cfg.half_window
    area = float(cfg.lk_window ** 2)
    min_eig = 1e-4 * area
    off = np.arange(-half, half + 1, dtype=np.float64)
    oy, ox = np.meshgrid(off, off, indexing="ij")
    ox = ox.reshape(1, -1)
    oy = oy.reshape(1, -1)

    pyr_a = build_pyramid(A, cfg.pyramid_levels)
    pyr_b = build_pyramid(B, cfg.pyramid_levels)
    top = len(pyr_a) - 1

    guess = np.zeros((n, 2))
    ill_base = np.zeros(n, dtype=bool)
    for level in range(top, -1, -1):
        la, lb = pyr_a[level], pyr_b[level]
        gx, gy = sobel_gradients(la)
        p = pts / (2.0 ** level)
        wx = p[:, :1] + ox
        wy = p[:, 1:] + oy
        Ia, Ix, Iy = _bilinear([la, gx, gy], wx, wy)
        gxx = np.sum(Ix * Ix, axis=1)
        gxy = np.sum(Ix * Iy, axis=1)
        gyy = np.sum(Iy * Iy, axis=1)
        det = gxx * gyy - gxy * gxy
        ok = min_eigenvalue(gxx, gxy, gyy) >= min_eig
        if level == 0:
            ill_base = ~ok

        nu = np.zeros((n, 2))
        active = ok.copy()
        for _ in range(cfg.lk_max_iters):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            shift = guess[idx] + nu[idx]
            Ib = _bilinear(lb, wx[idx] + shift[:, :1], wy[idx] + shift[:, 1:])
            diff = Ia[idx] - Ib
            ex = np.sum(diff * Ix[idx], axis=1)
            ey = np.sum(diff * Iy[idx], axis=1)
            d = det[idx]
            step_x = (gyy[idx] * ex - gxy[idx] * ey) / d
            step_y = (gxx[idx] * ey - gxy[idx] * ex) / d
            nu[idx, 0] += step_x
            nu[idx, 1] += step_y
            done = np.hypot(step_x, step_y) < cfg.lk_epsilon
            active[idx[done]] = False
        guess = guess + nu
        if level > 0:
            guess = 2.0 * guess

    end = pts + guess
    tracked = (
        _window_inside(pts, half, w, h)
        & _window_inside(end, half, w, h)
        & ~ill_base
        & np.all(np.isfinite(end), axis=1)
    )
    status = tuple(FlowStatus.TRACKED if t else FlowStatus.LOST for t in tracked)
    return FlowResult(pts, end, status)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def sample_reference_frames(timestamps: np.ndarray, sample_hz: float) -> list[int]:
    """Indices of the frames nearest to t0, t0 + 1/hz, t0 + 2/hz, ..."""
    ts = np.asarray(timestamps, dtype=np.float64)
    if ts.size == 0:
        return []
    period = 1.0 / sample_hz
    span = ts[-1] - ts[0]
    count = int(np.floor(span / period + 1e-9)) + 1
    picks: list[int] = []
    for k in range(count):
        target = ts[0] + k * period
        i = int(np.searchsorted(ts, target))
        if i >= len(ts) or (i > 0 and target - ts[i - 1] <= ts[i] - target):
            i -= 1
        if not picks or i != picks[-1]:
            picks.append(i)
    return picks


def verdict_from_displacements(
    displacements, cfg: CameraMotionConfig = CameraMotionConfig(), pairs: int = 0, sampled=()
) -> CameraVerdict:
    """Label a pooled set of tracked-feature displacement magnitudes (pixels)."""
    mags = np.asarray(displacements, dtype=np.float64).reshape(-1)
    n = int(mags.size)
    moving = int(np.count_nonzero(mags > cfg.disp_thresh_px))
    frac = moving / n if n else 0.0
    if n < cfg.min_valid_features:
        label = CameraLabel.INDETERMINATE
    elif frac >= cfg.moving_frac:
        label = CameraLabel.MOVING
    else:
        label = CameraLabel.STATIC
    return CameraVerdict(label, frac, n, int(pairs), moving, tuple(int(s) for s in sampled))


def classify_camera(seq: GrayFrameSequence, cfg: CameraMotionConfig = CameraMotionConfig()) -> CameraVerdict:
    picks = sample_reference_frames(seq.timestamps, cfg.sample_hz)
    if len(picks) < 2:
        raise SequenceTooShort(
            f"need at least 2 reference frames at {cfg.sample_hz:g} Hz, "
            f"got {len(picks)} from {len(seq)} frame(s)"
        )
    mags = []
    for ia, ib in zip(picks, picks[1:]):
        fa, fb = seq.frames[ia], seq.frames[ib]
        feats = shi_tomasi(fa, cfg)
        if not feats:
            continue
        flow = pyramidal_lk(fa, fb, feats, cfg)
        d = flow.displacement[flow.tracked]
        mags.append(np.hypot(d[:, 0], d[:, 1]))
    pooled = np.concatenate(mags) if mags else np.empty(0)
    return verdict_from_displacements(pooled, cfg, len(picks) - 1, picks)

"""Page-to-glyph preprocessing: denoise, binarize, deskew, segment, normalize, thin.

Images are plain numpy arrays: grayscale pages are 2-D uint8 (0-255), binary
images are 2-D bool where True marks ink (dark foreground).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import (
    AngleOutOfRangeError,
    EmptyCropError,
    EmptyPageError,
    UniformImageError,
    WrongDimensionsError,
)

NORMALIZED_SIZE = 32
MIN_COMPONENT_AREA = 5
MAX_SKEW_DEG = 15.0


@dataclass(frozen=True)
class BoundingBox:
    """Tight pixel box: inclusive top-left corner plus extent."""

    left: int
    top: int
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"degenerate bounding box {self}")


@dataclass
class CharacterRecord:
    """One segmented character with its normalized and thinned bitmaps."""

    bbox: BoundingBox
    crop: np.ndarray
    normalized: np.ndarray
    skeleton: np.ndarray
    label: object = None

    def validate(self) -> None:
        n = NORMALIZED_SIZE
        if self.normalized.shape != (n, n) or self.skeleton.shape != (n, n):
            raise WrongDimensionsError("normalized/skeleton must be 32x32")
        if self.crop.shape != (self.bbox.height, self.bbox.width):
            raise ValueError("crop dimensions disagree with bounding box")
        if np.any(self.skeleton & ~self.normalized):
            raise ValueError("skeleton foreground escapes normalized foreground")


def _check_gray(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise WrongDimensionsError("expected a 2-D grayscale image")
    if img.dtype != np.uint8:
        if img.size and (img.min() < 0 or img.max() > 255):
            raise ValueError("intensities must lie in [0, 255]")
        img = img.astype(np.uint8)
    return img


def _check_binary(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2:
        raise WrongDimensionsError("expected a 2-D binary image")
    return img.astype(bool)


def median_filter(img: np.ndarray) -> np.ndarray:
    """3x3 median with replicate (edge) padding; output keeps input dimensions."""
    img = _check_gray(img)
    padded = np.pad(img, 1, mode="edge")
    windows = sliding_window_view(padded, (3, 3))
    return np.median(windows, axis=(2, 3)).astype(np.uint8)


def otsu_binarize(img: np.ndarray):
    """Global Otsu threshold.

    Returns (threshold, binary) where the binary image marks pixels with
    intensity <= threshold as foreground (ink is dark). The threshold is the
    smallest t in [0, 254] maximizing the between-class variance of the
    256-bin histogram.
    """
    img = _check_gray(img)
    hist = np.bincount(img.ravel(), minlength=256).astype(np.float64)
    if np.count_nonzero(hist) < 2:
        raise UniformImageError("image has a single intensity; cannot binarize")

    total = hist.sum()
    weights = np.cumsum(hist)  # pixels with intensity <= t
    moments = np.cumsum(hist * np.arange(256))
    w0 = weights[:-1] / total
    w1 = 1.0 - w0
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = np.where(weights[:-1] > 0, moments[:-1] / weights[:-1], 0.0)
        mu1 = np.where(
            total - weights[:-1] > 0,
            (moments[-1] - moments[:-1]) / (total - weights[:-1]),
            0.0,
        )
    sigma_b = np.where(
        (w0 > 0) & (w1 > 0), w0 * w1 * (mu0 - mu1) ** 2, 0.0
    )
    threshold = int(np.argmax(sigma_b))  # first maximizer = smallest t
    return threshold, img <= threshold


# --- rotation -------------------------------------------------------------

def _cubic_kernel(x: np.ndarray) -> np.ndarray:
    """Keys bicubic convolution kernel with a = -0.5 (4-point support)."""
    x = np.abs(x)
    out = np.zeros_like(x)
    near = x <= 1.0
    far = (x > 1.0) & (x < 2.0)
    out[near] = 1.5 * x[near] ** 3 - 2.5 * x[near] ** 2 + 1.0
    out[far] = -0.5 * x[far] ** 3 + 2.5 * x[far] ** 2 - 4.0 * x[far] + 2.0
    return out


def _rotated_extent(h: int, w: int, angle_deg: float):
    rad = math.radians(angle_deg)
    c, s = abs(math.cos(rad)), abs(math.sin(rad))
    return int(math.ceil(h * c + w * s)), int(math.ceil(w * c + h * s))


def _inverse_map(out_shape, in_shape, angle_deg: float):
    """Destination pixel centers mapped back into source coordinates."""
    rad = math.radians(angle_deg)
    cos, sin = math.cos(rad), math.sin(rad)
    out_h, out_w = out_shape
    in_h, in_w = in_shape
    cy_out, cx_out = (out_h - 1) / 2.0, (out_w - 1) / 2.0
    cy_in, cx_in = (in_h - 1) / 2.0, (in_w - 1) / 2.0
    ys, xs = np.mgrid[0:out_h, 0:out_w].astype(np.float64)
    dy = ys - cy_out
    dx = xs - cx_out
    # content rotates by +angle; sample source with the inverse rotation
    src_x = cos * dx + sin * dy + cx_in
    src_y = -sin * dx + cos * dy + cy_in
    return src_y, src_x


def rotate_nearest(img: np.ndarray, angle_deg: float, out_shape=None) -> np.ndarray:
    """Rotate a binary image about its center, nearest-neighbor sampling."""
    img = _check_binary(img)
    if out_shape is None:
        out_shape = img.shape
    src_y, src_x = _inverse_map(out_shape, img.shape, angle_deg)
    iy = np.rint(src_y).astype(np.int64)
    ix = np.rint(src_x).astype(np.int64)
    inside = (iy >= 0) & (iy < img.shape[0]) & (ix >= 0) & (ix < img.shape[1])
    out = np.zeros(out_shape, dtype=bool)
    out[inside] = img[iy[inside], ix[inside]]
    return out


def _bicubic_gather(src: np.ndarray, src_y: np.ndarray, src_x: np.ndarray) -> np.ndarray:
    """Evaluate Keys bicubic interpolation of `src` (float) at fractional coords.

    Samples outside the source read as 0 (background).
    """
    pad = 2
    padded = np.pad(src, pad, mode="constant", constant_values=0.0)
    base_y = np.floor(src_y).astype(np.int64)
    base_x = np.floor(src_x).astype(np.int64)
    acc = np.zeros(src_y.shape, dtype=np.float64)
    for dy in range(-1, 3):
        ty = base_y + dy
        wy = _cubic_kernel(src_y - ty)
        pyv = np.clip(ty + pad, 0, padded.shape[0] - 1)
        row_ok = (ty + pad >= 0) & (ty + pad <= padded.shape[0] - 1)
        for dx in range(-1, 3):
            tx = base_x + dx
            wx = _cubic_kernel(src_x - tx)
            pxv = np.clip(tx + pad, 0, padded.shape[1] - 1)
            col_ok = (tx + pad >= 0) & (tx + pad <= padded.shape[1] - 1)
            vals = padded[pyv, pxv]
            vals = np.where(row_ok & col_ok, vals, 0.0)
            acc += wy * wx * vals
    return acc


def rotate_bicubic(img: np.ndarray, angle_deg: float, enlarge: bool = True) -> np.ndarray:
    """Rotate a binary image with bicubic interpolation, re-binarized at 0.5."""
    img = _check_binary(img)
    out_shape = _rotated_extent(*img.shape, angle_deg) if enlarge else img.shape
    src_y, src_x = _inverse_map(out_shape, img.shape, angle_deg)
    values = _bicubic_gather(img.astype(np.float64), src_y, src_x)
    return values >= 0.5


def _profile_variance(img: np.ndarray) -> float:
    return float(np.var(img.sum(axis=1, dtype=np.int64)))


def detect_skew(page: np.ndarray) -> float:
    """Estimate page skew in degrees within +/-15.

    Maximizes the variance of the horizontal projection profile after undoing
    the candidate angle: coarse 0.5-degree sweep, then a 0.1-degree sweep in a
    +/-0.5 window. Ties prefer angles closer to 0, then negative ones.
    """
    page = _check_binary(page)
    if not page.any():
        raise EmptyPageError("cannot detect skew on a blank page")

    pad_shape = _rotated_extent(*page.shape, MAX_SKEW_DEG)
    canvas = np.zeros(pad_shape, dtype=bool)
    oy = (pad_shape[0] - page.shape[0]) // 2
    ox = (pad_shape[1] - page.shape[1]) // 2
    canvas[oy : oy + page.shape[0], ox : ox + page.shape[1]] = page

    def score(tenths: int) -> float:
        return _profile_variance(rotate_nearest(canvas, -tenths / 10.0))

    def sweep(candidates) -> int:
        # tie preference: smaller |angle| first, negative before positive
        ordered = sorted(candidates, key=lambda t: (abs(t), t >= 0 and t != 0))
        best, best_score = None, -1.0
        for t in ordered:
            s = score(t)
            if s > best_score:
                best, best_score = t, s
        return best

    coarse = sweep(range(-150, 151, 5))
    lo = max(coarse - 5, -150)
    hi = min(coarse + 5, 150)
    fine = sweep(range(lo, hi + 1))
    return fine / 10.0


def deskew(page: np.ndarray, angle_deg: float) -> np.ndarray:
    """Undo a detected skew by rotating the page by -angle with bicubic sampling.

    The output canvas is enlarged to hold all rotated content; regions the
    source never covered are background.
    """
    page = _check_binary(page)
    if abs(angle_deg) > MAX_SKEW_DEG:
        raise AngleOutOfRangeError(f"|{angle_deg}| exceeds {MAX_SKEW_DEG} degrees")
    return rotate_bicubic(page, -angle_deg, enlarge=True)


# --- segmentation ---------------------------------------------------------

def segment_lines(page: np.ndarray) -> list[tuple[int, int]]:
    """Split a page into text-line row intervals (inclusive, top to bottom).

    Lines are maximal runs of rows with any ink; runs holding several profile
    peaks (touching lines) are split at the minimum-count row between peaks.
    A peak row carries more than half of the run's maximum row count.
    """
    page = _check_binary(page)
    counts = page.sum(axis=1, dtype=np.int64)
    intervals: list[tuple[int, int]] = []
    row = 0
    n = len(counts)
    while row < n:
        if counts[row] == 0:
            row += 1
            continue
        start = row
        while row < n and counts[row] > 0:
            row += 1
        end = row - 1
        intervals.extend(_split_run(counts, start, end))
    return intervals


def _split_run(counts: np.ndarray, start: int, end: int) -> list[tuple[int, int]]:
    run = counts[start : end + 1]
    peak_level = run.max() / 2.0
    is_peak = run > peak_level
    groups = []
    i = 0
    while i < len(run):
        if is_peak[i]:
            j = i
            while j + 1 < len(run) and is_peak[j + 1]:
                j += 1
            groups.append((i, j))
            i = j + 1
        else:
            i += 1
    if len(groups) <= 1:
        return [(start, end)]
    cuts = []
    for (_, g1_end), (g2_start, _) in zip(groups, groups[1:]):
        valley = run[g1_end + 1 : g2_start]
        cuts.append(g1_end + 1 + int(np.argmin(valley)) + start)
    pieces = []
    lo = start
    for cut in cuts:
        pieces.append((lo, cut - 1))
        lo = cut
    pieces.append((lo, end))
    return pieces


def label_components(img: np.ndarray):
    """8-connected component labeling. Returns (labels int array, count).

    Labels are assigned in raster-scan order of each component's first pixel,
    starting at 1; background stays 0.
    """
    img = _check_binary(img)
    h, w = img.shape
    labels = np.zeros((h, w), dtype=np.int32)
    current = 0
    for r in range(h):
        row = img[r]
        for c in range(w):
            if not row[c] or labels[r, c]:
                continue
            current += 1
            stack = [(r, c)]
            labels[r, c] = current
            while stack:
                y, x = stack.pop()
                y0, y1 = max(y - 1, 0), min(y + 2, h)
                x0, x1 = max(x - 1, 0), min(x + 2, w)
                for ny in range(y0, y1):
                    for nx in range(x0, x1):
                        if img[ny, nx] and not labels[ny, nx]:
                            labels[ny, nx] = current
                            stack.append((ny, nx))
    return labels, current


def segment_characters(line: np.ndarray, min_area: int = MIN_COMPONENT_AREA) -> list[CharacterRecord]:
    """Extract connected components of a line strip as raw character records.

    Components smaller than `min_area` pixels are dropped as noise. Records
    hold the tight bounding box and the component's own pixels; `normalized`
    and `skeleton` are filled by the caller. Ordered by left edge, then top.
    """
    line = _check_binary(line)
    labels, count = label_components(line)
    records = []
    for lab in range(1, count + 1):
        mask = labels == lab
        area = int(mask.sum())
        if area < min_area:
            continue
        rows = np.flatnonzero(mask.any(axis=1))
        cols = np.flatnonzero(mask.any(axis=0))
        top, bottom = int(rows[0]), int(rows[-1])
        left, right = int(cols[0]), int(cols[-1])
        bbox = BoundingBox(left=left, top=top, width=right - left + 1, height=bottom - top + 1)
        crop = mask[top : bottom + 1, left : right + 1]
        records.append(
            CharacterRecord(bbox=bbox, crop=crop, normalized=None, skeleton=None)
        )
    records.sort(key=lambda rec: (rec.bbox.left, rec.bbox.top))
    return records


# --- normalization and thinning -------------------------------------------

def _resample_axis(values: np.ndarray, out_len: int, axis: int) -> np.ndarray:
    """1-D Keys bicubic resample along one axis with edge-clamped taps."""
    in_len = values.shape[axis]
    scale = in_len / out_len
    centers = (np.arange(out_len) + 0.5) * scale - 0.5
    base = np.floor(centers).astype(np.int64)
    moved = np.moveaxis(values, axis, 0)
    acc = np.zeros((out_len,) + moved.shape[1:], dtype=np.float64)
    for tap in range(-1, 3):
        idx = base + tap
        w = _cubic_kernel(centers - idx)
        idx = np.clip(idx, 0, in_len - 1)
        acc += w.reshape((-1,) + (1,) * (moved.ndim - 1)) * moved[idx]
    return np.moveaxis(acc, 0, axis)


def normalize_size(crop: np.ndarray, size: int = NORMALIZED_SIZE) -> np.ndarray:
    """Bicubic resample of a binary crop to size x size, re-binarized at 0.5.

    Each axis scales independently; the aspect ratio is intentionally not
    preserved (it survives separately as a global feature).
    """
    crop = _check_binary(crop)
    if crop.size == 0 or not crop.any():
        raise EmptyCropError("cannot normalize an empty crop")
    field = crop.astype(np.float64)
    field = _resample_axis(field, size, axis=0)
    field = _resample_axis(field, size, axis=1)
    return field >= 0.5


def _neighbors(padded: np.ndarray):
    """The 8 neighbor planes in circular order N, NE, E, SE, S, SW, W, NW."""
    return (
        padded[:-2, 1:-1],
        padded[:-2, 2:],
        padded[1:-1, 2:],
        padded[2:, 2:],
        padded[2:, 1:-1],
        padded[2:, :-2],
        padded[1:-1, :-2],
        padded[:-2, :-2],
    )


def _zhang_suen_pass(img: np.ndarray, second: bool) -> np.ndarray:
    """Deletion mask for one Zhang-Suen subiteration."""
    padded = np.pad(img, 1, mode="constant", constant_values=False).astype(np.uint8)
    p2, p3, p4, p5, p6, p7, p8, p9 = _neighbors(padded)
    seq = (p2, p3, p4, p5, p6, p7, p8, p9, p2)
    b = sum(int_plane.astype(np.int32) for int_plane in seq[:-1])
    a = sum(((seq[i] == 0) & (seq[i + 1] == 1)).astype(np.int32) for i in range(8))
    if not second:
        cond = (p2 * p4 * p6 == 0) & (p4 * p6 * p8 == 0)
    else:
        cond = (p2 * p4 * p8 == 0) & (p2 * p6 * p8 == 0)
    return img & (b >= 2) & (b <= 6) & (a == 1) & cond


def _protect_vanishing(img: np.ndarray, deletions: np.ndarray) -> np.ndarray:
    """Keep one pixel of any component the pass would delete entirely.

    Classic Zhang-Suen erases isolated 2x2 squares; retaining the component's
    first raster pixel keeps the component count invariant.
    """
    if not deletions.any():
        return deletions
    labels, count = label_components(img)
    for lab in range(1, count + 1):
        mask = labels == lab
        if np.array_equal(mask & deletions, mask):
            anchor = np.flatnonzero(mask.ravel())[0]
            deletions = deletions.copy()
            deletions.ravel()[anchor] = False
    return deletions


def zhang_suen(img: np.ndarray) -> np.ndarray:
    """Zhang-Suen two-subiteration thinning to fixpoint, any image size."""
    img = _check_binary(img).copy()
    while True:
        changed = False
        for second in (False, True):
            deletions = _zhang_suen_pass(img, second)
            deletions = _protect_vanishing(img, deletions)
            if deletions.any():
                img[deletions] = False
                changed = True
        if not changed:
            return img


def thin(norm: np.ndarray) -> np.ndarray:
    """Thin a 32x32 normalized character to a 1-pixel-wide skeleton."""
    norm = _check_binary(norm)
    n = NORMALIZED_SIZE
    if norm.shape != (n, n):
        raise WrongDimensionsError(f"thin expects {n}x{n}, got {norm.shape}")
    return zhang_suen(norm)


# --- full pipeline ---------------------------------------------------------

def finish_record(record: CharacterRecord) -> CharacterRecord:
    """Fill the normalized and skeleton bitmaps of a segmented record."""
    record.normalized = normalize_size(record.crop)
    record.skeleton = thin(record.normalized)
    return record


def preprocess_page(gray: np.ndarray) -> list[CharacterRecord]:
    """Run the full page pipeline: median filter, Otsu, deskew, segment, thin.

    Returns fully populated character records in reading order; bounding
    boxes refer to the deskewed page.
    """
    filtered = median_filter(gray)
    _, binary = otsu_binarize(filtered)
    if not binary.any():
        return []
    angle = detect_skew(binary)
    page = deskew(binary, angle)
    records: list[CharacterRecord] = []
    for top, bottom in segment_lines(page):
        strip = page[top : bottom + 1]
        for rec in segment_characters(strip):
            rec.bbox = BoundingBox(
                left=rec.bbox.left,
                top=rec.bbox.top + top,
                width=rec.bbox.width,
                height=rec.bbox.height,
            )
            records.append(finish_record(rec))
    return records


def preprocess_character(gray: np.ndarray) -> CharacterRecord:
    """Pipeline for a single pre-segmented character image.

    Median filter and Otsu as on pages, then drop sub-threshold specks, take
    the tight box around the remaining ink, and normalize + thin it. Skew
    and line segmentation do not apply to isolated glyphs.
    """
    filtered = median_filter(gray)
    _, binary = otsu_binarize(filtered)
    labels, count = label_components(binary)
    keep = np.zeros_like(binary)
    for lab in range(1, count + 1):
        mask = labels == lab
        if int(mask.sum()) >= MIN_COMPONENT_AREA:
            keep |= mask
    if not keep.any():
        raise EmptyCropError("no component of sufficient area")
    rows = np.flatnonzero(keep.any(axis=1))
    cols = np.flatnonzero(keep.any(axis=0))
    bbox = BoundingBox(
        left=int(cols[0]),
        top=int(rows[0]),
        width=int(cols[-1] - cols[0] + 1),
        height=int(rows[-1] - rows[0] + 1),
    )
    crop = keep[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1]
    record = CharacterRecord(bbox=bbox, crop=crop, normalized=None, skeleton=None)
    return finish_record(record)

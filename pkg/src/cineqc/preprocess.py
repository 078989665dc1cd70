"""Intensity normalization and motion-driven ROI extraction.

The ROI detector finds the center of periodically moving structures without
supervision: take the per-pixel magnitude of temporal-frequency bin 1 (one
cardiac cycle per sequence makes that the fundamental motion frequency),
then run a circular Hough vote — each strong-gradient pixel of the harmonic
map votes along +/- its gradient direction at every candidate radius, and
the smoothed accumulator peak is the center. Cropping copies pixels, never
interpolates: resampling would alter the very image quality being assessed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateIntensity, InvalidRoi, NoCircularStructure, NoMotionDetected
from .numerics import as_real_volume, temporal_dft_magnitude

DEFAULT_CROP = 80
GRAD_THRESHOLD = 0.1   # on the [0,1]-normalized harmonic map
MOTION_FLOOR = 1e-3    # max harmonic magnitude below this = no motion


@dataclass(frozen=True)
class RoiResult:
    center: tuple          # (row, col) integer pixels
    crop_size: int
    vote_score: float      # peak of the smoothed Hough accumulator


def normalize(seq) -> np.ndarray:
    """Affine rescale of the whole sequence to min 0 / max 1.

    A single global min/max is used (not per frame) so inter-frame intensity
    fluctuation — the signal artefact detection relies on — is preserved.
    Idempotent on already-normalized input.
    """
    vol = as_real_volume(seq)
    lo = vol.min()
    hi = vol.max()
    if hi == lo:
        raise DegenerateIntensity("sequence has constant intensity")
    return (vol - lo) / (hi - lo)


def _box3(img):
    """3x3 box filter with zero padding outside the image."""
    p = np.pad(img, 1)
    out = np.zeros_like(img)
    for dr in range(3):
        for dc in range(3):
            out += p[dr:dr + img.shape[0], dc:dc + img.shape[1]]
    return out / 9.0


def find_roi_center(seq, radius_range=None, crop_size=DEFAULT_CROP,
                    grad_threshold=GRAD_THRESHOLD, motion_floor=MOTION_FLOOR,
                    temporal_bin=1) -> RoiResult:
    """Locate the center of the dominant periodically moving structure.

    radius_range: (r_min, r_max) candidate circle radii in pixels;
        defaults to (4, min(H, W)/4).
    """
    vol = as_real_volume(seq)
    T, H, W = vol.shape
    if T < 4:
        raise InvalidRoi(f"need at least 4 frames for motion analysis, got {T}")
    if radius_range is None:
        radius_range = (4, min(H, W) // 4)
    r_min, r_max = int(radius_range[0]), int(radius_range[1])
    if r_min < 1 or r_max < r_min or r_max >= min(H, W) / 2:
        raise InvalidRoi(f"bad radius range ({r_min}, {r_max}) for {H}x{W} image")
    if not (0 < crop_size <= H and crop_size <= W):
        raise InvalidRoi(f"crop size {crop_size} does not fit a {H}x{W} image")

    harmonic = temporal_dft_magnitude(vol, temporal_bin)
    peak = harmonic.max()
    if peak < motion_floor:
        raise NoMotionDetected(f"harmonic map peak {peak:.2e} below floor {motion_floor:.2e}")
    lo = harmonic.min()
    harmonic = (harmonic - lo) / (peak - lo) if peak > lo else np.zeros_like(harmonic)

    grad_r, grad_c = np.gradient(harmonic)
    mag = np.hypot(grad_r, grad_c)
    strong = mag > grad_threshold
    acc = np.zeros((H, W))
    if np.any(strong):
        rr, cc = np.nonzero(strong)
        ur = grad_r[rr, cc] / mag[rr, cc]
        uc = grad_c[rr, cc] / mag[rr, cc]
        for radius in range(r_min, r_max + 1):
            for sign in (1.0, -1.0):
                vr = np.rint(rr + sign * radius * ur).astype(np.int64)
                vc = np.rint(cc + sign * radius * uc).astype(np.int64)
                ok = (vr >= 0) & (vr < H) & (vc >= 0) & (vc < W)
                np.add.at(acc, (vr[ok], vc[ok]), 1.0)
    if acc.sum() == 0:
        raise NoCircularStructure("no Hough votes cast")

    smoothed = _box3(acc)
    flat = int(np.argmax(smoothed))  # first occurrence = smallest (row, col) lexicographically
    center = (flat // W, flat % W)
    return RoiResult(center=center, crop_size=int(crop_size),
                     vote_score=float(smoothed[center]))


def roi_window(roi: RoiResult, H, W):
    """(top, left) of the crop window, clamped inside the image."""
    size = roi.crop_size
    if size > H or size > W:
        raise InvalidRoi(f"crop size {size} exceeds image dims {H}x{W}")
    top = min(max(roi.center[0] - size // 2, 0), H - size)
    left = min(max(roi.center[1] - size // 2, 0), W - size)
    return int(top), int(left)


def crop_roi(seq, roi: RoiResult) -> np.ndarray:
    """Copy the crop_size x crop_size window around the ROI center."""
    vol = as_real_volume(seq)
    _, H, W = vol.shape
    top, left = roi_window(roi, H, W)
    size = roi.crop_size
    return vol[:, top:top + size, left:left + size].copy()

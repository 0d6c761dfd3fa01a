"""Edge-pretreated dense Lucas-Kanade optical flow.

Frames are reduced to continuous edge-strength planes (the pre-suppression
detector magnitude, normalized to [0, 1]) before the flow solve; binary
edge maps would have zero gradients almost everywhere. The solve is
single-level least squares over a square window, masked where the structure
tensor degenerates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .algebra import ColorVector
from .detectors import detect
from .exceptions import ParameterError
from .image_io import ColorImage
from .scalespace import ScalePair

DEFAULT_WINDOW = 15
MIN_TENSOR_EIGENVALUE = 1e-6


@dataclass(frozen=True)
class FlowField:
    """Per-pixel displacement (u along x1, v along x2) with a validity mask."""

    u: np.ndarray
    v: np.ndarray
    valid: np.ndarray


def pretreat(frame: ColorImage, method: str, nu: ColorVector,
             scales: ScalePair | None = None) -> np.ndarray:
    """Detector magnitude of a frame, normalized to [0, 1]."""
    gm = detect(frame, method, nu, scales)
    peak = gm.magnitude.max()
    if peak <= 0:
        return np.zeros_like(gm.magnitude)
    return gm.magnitude / peak


def lk_flow(p1: np.ndarray, p2: np.ndarray, window: int = DEFAULT_WINDOW) -> FlowField:
    """Dense Lucas-Kanade between two planes.

    Gradients are averaged between the frames so flow(p1, p2) is the exact
    negation of flow(p2, p1) on the shared valid set.
    """
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    if p1.shape != p2.shape or p1.ndim != 2:
        raise ParameterError("frames must be 2D planes of equal shape")
    if window < 3 or window % 2 == 0:
        raise ParameterError("window must be an odd integer >= 3")

    gx = 0.5 * (np.gradient(p1, axis=1) + np.gradient(p2, axis=1))
    gy = 0.5 * (np.gradient(p1, axis=0) + np.gradient(p2, axis=0))
    it = p2 - p1

    # Window-averaged (normalized) structure tensor; the normalization
    # cancels in the solve but makes the eigenvalue gate scale-free.
    def window_mean(x):
        return ndimage.uniform_filter(x, size=window, mode="constant")

    j11 = window_mean(gx * gx)
    j12 = window_mean(gx * gy)
    j22 = window_mean(gy * gy)
    b1 = -window_mean(gx * it)
    b2 = -window_mean(gy * it)

    trace = j11 + j22
    disc = np.sqrt((j11 - j22) ** 2 + 4.0 * j12 ** 2)
    lam_min = 0.5 * (trace - disc)
    valid = lam_min >= MIN_TENSOR_EIGENVALUE

    det = j11 * j22 - j12 * j12
    safe_det = np.where(valid, det, 1.0)
    u = np.where(valid, (j22 * b1 - j12 * b2) / safe_det, 0.0)
    v = np.where(valid, (j11 * b2 - j12 * b1) / safe_det, 0.0)
    return FlowField(u, v, valid)


def _hsv_to_rgb(h: np.ndarray, s: np.ndarray, v: np.ndarray) -> np.ndarray:
    h6 = (h % 1.0) * 6.0
    i = np.floor(h6).astype(int) % 6
    f = h6 - np.floor(h6)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    rgb = np.empty(h.shape + (3,), dtype=np.float64)
    for idx, (r, g, b) in enumerate(((v, t, p), (q, v, p), (p, v, t),
                                     (p, q, v), (t, p, v), (v, p, q))):
        mask = i == idx
        rgb[mask, 0] = r[mask]
        rgb[mask, 1] = g[mask]
        rgb[mask, 2] = b[mask]
    return rgb


def flow_to_color(field: FlowField, max_magnitude: float | None = None) -> ColorImage:
    """Color-wheel rendering: hue encodes the flow angle, saturation the
    magnitude (zero flow is white); invalid pixels are black."""
    mag = np.hypot(field.u, field.v)
    if max_magnitude is None:
        valid_mag = mag[field.valid]
        max_magnitude = float(valid_mag.max()) if valid_mag.size else 0.0
    hue = np.arctan2(field.v, field.u) / (2.0 * np.pi)
    sat = mag / max_magnitude if max_magnitude > 0 else np.zeros_like(mag)
    sat = np.clip(sat, 0.0, 1.0)
    rgb = _hsv_to_rgb(hue, sat, np.ones_like(sat))
    rgb[~field.valid] = 0.0
    return ColorImage(rgb)


def color_to_flow(img: ColorImage, max_magnitude: float) -> FlowField:
    """Inverse of flow_to_color for round-trip checks (black means invalid)."""
    rgb = img.channels
    v = rgb.max(axis=2)
    valid = v > 1e-6
    mn = rgb.min(axis=2)
    delta = v - mn
    sat = np.where(v > 0, delta / np.maximum(v, 1e-12), 0.0)

    hue = np.zeros_like(v)
    r, g, b = rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]
    nonzero = delta > 1e-12
    rmax = nonzero & (v == r)
    gmax = nonzero & (v == g) & ~rmax
    bmax = nonzero & (v == b) & ~rmax & ~gmax
    safe = np.where(nonzero, delta, 1.0)
    hue[rmax] = ((g - b)[rmax] / safe[rmax]) % 6.0
    hue[gmax] = (b - r)[gmax] / safe[gmax] + 2.0
    hue[bmax] = (r - g)[bmax] / safe[bmax] + 4.0
    hue /= 6.0

    angle = hue * 2.0 * np.pi
    mag = sat * max_magnitude
    return FlowField(mag * np.cos(angle), mag * np.sin(angle), valid)


def endpoint_error(field: FlowField, true_u: float, true_v: float,
                   region: np.ndarray | None = None) -> float:
    """Mean Euclidean distance to a constant ground-truth flow over the
    valid pixels, optionally restricted to a region of interest."""
    mask = field.valid if region is None else (field.valid & region)
    if not mask.any():
        return float("inf")
    err = np.hypot(field.u - true_u, field.v - true_v)
    return float(err[mask].mean())

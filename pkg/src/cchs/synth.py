"""Deterministic synthetic fixtures with analytic ground truth.

The rounded-rectangle scene mirrors the layout used throughout the
experiments: three rectangles (blue, red, yellow) whose corner rounding is
curvature * min(side), drawn on a neutral gray background. Ground-truth
boundaries are the inside pixels with a 4-connected outside neighbor, which
makes each boundary a closed 1-px curve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .exceptions import ParameterError
from .image_io import ColorImage

BACKGROUND_GRAY = 0.2

# (name, sRGB color, curvature, center x, center y, width, height) at the
# reference 256x256 canvas; positions scale with the requested size.
RECTANGLES = (
    ("blue", (0.0, 0.0, 1.0), 0.2, 128.0, 55.0, 170.0, 50.0),
    ("red", (1.0, 0.0, 0.0), 0.2, 128.0, 128.0, 160.0, 48.0),
    ("yellow", (1.0, 1.0, 0.0), 0.1, 128.0, 206.0, 150.0, 60.0),
)


@dataclass(frozen=True)
class RoundedRect:
    cx: float
    cy: float
    width: float
    height: float
    radius: float

    def sdf(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        qx = np.abs(x - self.cx) - (self.width / 2.0 - self.radius)
        qy = np.abs(y - self.cy) - (self.height / 2.0 - self.radius)
        outside = np.hypot(np.maximum(qx, 0.0), np.maximum(qy, 0.0))
        inside = np.minimum(np.maximum(qx, qy), 0.0)
        return outside + inside - self.radius

    def perimeter(self) -> float:
        straight = 2.0 * (self.width - 2 * self.radius) + 2.0 * (self.height - 2 * self.radius)
        return straight + 2.0 * np.pi * self.radius


def _boundary(inside: np.ndarray) -> np.ndarray:
    eroded = ndimage.binary_erosion(inside, structure=np.array(
        [[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool), border_value=0)
    return inside & ~eroded


def rectangles(width: int = 256, height: int = 256):
    """Three rounded rectangles plus one ground-truth boundary map per color.

    Returns (image, truths, shapes) where truths maps color name to a bool
    plane and shapes maps color name to the RoundedRect drawn.
    """
    if width < 64 or height < 64:
        raise ParameterError("rectangles fixture needs at least 64x64")
    sx = width / 256.0
    sy = height / 256.0
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    xs += 0.5
    ys += 0.5
    arr = np.full((height, width, 3), BACKGROUND_GRAY, dtype=np.float64)
    truths = {}
    shapes = {}
    for name, color, curvature, cx, cy, w, h in RECTANGLES:
        rect = RoundedRect(cx * sx, cy * sy, w * sx, h * sy,
                           curvature * min(w * sx, h * sy))
        inside = rect.sdf(xs, ys) <= 0.0
        arr[inside] = color
        truths[name] = _boundary(inside)
        shapes[name] = rect
    return ColorImage(arr), truths, shapes


def step_edge(width: int, height: int, color_left, color_right, column: int,
              antialias: bool = False):
    """A vertical color step; the true edge is the first right-color column.

    The antialiased variant blends the two colors 50/50 in the column just
    left of the step.
    """
    if not 1 <= column < width:
        raise ParameterError("column must be inside the image")
    left = np.asarray(color_left, dtype=np.float64)
    right = np.asarray(color_right, dtype=np.float64)
    arr = np.empty((height, width, 3), dtype=np.float64)
    arr[:, :column] = left
    arr[:, column:] = right
    if antialias:
        arr[:, column - 1] = 0.5 * (left + right)
    truth = np.zeros((height, width), dtype=bool)
    truth[:, column] = True
    return ColorImage(arr), truth


def _coverage_1d(coords: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Fraction of the unit pixel [c - 0.5, c + 0.5] inside [lo, hi]."""
    return np.clip(np.minimum(coords + 0.5, hi) - np.maximum(coords - 0.5, lo), 0.0, 1.0)


def translated_square_pair(shift, size: int = 96, square_side: float = 32.0,
                           color=(1.0, 1.0, 0.0), background: float = BACKGROUND_GRAY,
                           window: int = 15):
    """Two frames of a colored square translated by (dx, dy) pixels.

    The square is rendered with exact box coverage, so fractional shifts are
    supported; shifts beyond half the flow window are rejected as
    untrackable motion.
    """
    dx, dy = float(shift[0]), float(shift[1])
    if max(abs(dx), abs(dy)) > window / 2.0:
        raise ParameterError(
            f"shift {shift} exceeds half the {window}-pixel flow window")
    color = np.asarray(color, dtype=np.float64)

    def render(ox: float, oy: float) -> ColorImage:
        ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
        xs += 0.5
        ys += 0.5
        cx = size / 2.0 + ox
        cy = size / 2.0 + oy
        cov = (_coverage_1d(xs, cx - square_side / 2, cx + square_side / 2)
               * _coverage_1d(ys, cy - square_side / 2, cy + square_side / 2))
        arr = background + cov[:, :, None] * (color[None, None, :] - background)
        return ColorImage(arr)

    return render(-dx / 2.0, -dy / 2.0), render(dx / 2.0, dy / 2.0)


def square_support(shift, size: int = 96, square_side: float = 32.0,
                   margin: float = 1.0) -> np.ndarray:
    """Pixels covered by the square in either frame of the pair (the region
    where the true motion is observable)."""
    dx, dy = float(shift[0]), float(shift[1])
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    xs += 0.5
    ys += 0.5

    def box(ox, oy):
        cx = size / 2.0 + ox
        cy = size / 2.0 + oy
        half = square_side / 2.0 + margin
        return (np.abs(xs - cx) <= half) & (np.abs(ys - cy) <= half)

    return box(-dx / 2.0, -dy / 2.0) | box(dx / 2.0, dy / 2.0)

"""Shared fixtures: band-limited synthetic images aligned to pixel centers.

Sampling cosines at x + 1/2 (half-integer pixel centers) makes the mirror
extension used by the filters coincide exactly with the periodic
continuation of the underlying analytic plane, so frequency-domain oracles
can be evaluated per pixel without boundary confounds.
"""

import numpy as np
import pytest

from cchs.algebra import ColorVector
from cchs.image_io import ColorImage


def cos_plane(height: int, width: int, cycles_x: float = 0.0,
              cycles_y: float = 0.0, amplitude: float = 1.0,
              offset: float = 0.0) -> np.ndarray:
    """cos(w0x * x1) * cos(w0y * x2) sampled at pixel centers."""
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    xs += 0.5
    ys += 0.5
    plane = np.full((height, width), 1.0)
    if cycles_x:
        plane = plane * np.cos(2.0 * np.pi * cycles_x * xs / width)
    if cycles_y:
        plane = plane * np.cos(2.0 * np.pi * cycles_y * ys / height)
    return offset + amplitude * plane


def pixel_centers(height: int, width: int):
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    return xs + 0.5, ys + 0.5


def smooth_image(n: int = 128) -> ColorImage:
    """Band-limited colorful image (frequencies <= 4 cycles per width),
    channels in (0, 1), mirror-exact sampling."""
    ys, xs = np.mgrid[0:n, 0:n].astype(np.float64)

    def cx(k):
        return np.cos(np.pi * k * (xs + 0.5) / n)

    def cy(k):
        return np.cos(np.pi * k * (ys + 0.5) / n)

    f1 = 0.55 + 0.20 * cx(3) * cy(2) + 0.10 * cx(1)
    f2 = 0.50 + 0.15 * cx(2) * cy(1) - 0.12 * cy(4)
    f3 = 0.45 + 0.18 * cx(1) * cy(3) + 0.08 * cx(4) * cy(1)
    return ColorImage(np.stack([f1, f2, f3], axis=-1))


INTERIOR = (slice(12, -12), slice(12, -12))


@pytest.fixture
def smooth_img():
    return smooth_image()


@pytest.fixture
def nu():
    return ColorVector(0.8, 0.45, 0.4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

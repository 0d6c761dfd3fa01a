"""Two-scale Poisson / conjugate-Poisson filtering of image channels.

The 1D kernels are P_y(x) = y / (pi (y^2 + x^2)) and its conjugate
Q_y(x) = x / (pi (y^2 + x^2)); 2D filtering is separable (one kind per
axis). Filtering runs in the frequency domain with the analytic transfer
functions

    P: exp(-y|w|)          dP/dy: -|w| exp(-y|w|)
    Q: -i sgn(w) exp(-y|w|)  dQ/dy: -|w| times the Q response

so the kernels carry no truncation error; the sign of the Q transfer is
fixed so that filtering cos(w0 x) yields exp(-y w0) sin(w0 x), matching the
classical Hilbert conjugate. Each line is mirror-extended to twice its
length before the transform to suppress wraparound, then cropped back. Grid
spacing is one pixel; scales are in pixel units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError
from .image_io import ColorImage

KINDS = ("P", "Q", "dP", "dQ")


@dataclass(frozen=True)
class ScalePair:
    """Positive filter scales (y1, y2) for the horizontal and vertical axes."""

    y1: float
    y2: float

    def __post_init__(self):
        if not (self.y1 > 0 and np.isfinite(self.y1)):
            raise ParameterError(f"y1 must be positive, got {self.y1}")
        if not (self.y2 > 0 and np.isfinite(self.y2)):
            raise ParameterError(f"y2 must be positive, got {self.y2}")


def poisson_kernel_1d(y: float, x) -> np.ndarray:
    """P_y(x) = y / (pi (y^2 + x^2)); even in x, positive, unit mass."""
    if not y > 0:
        raise ParameterError(f"scale y must be positive, got {y}")
    x = np.asarray(x, dtype=np.float64)
    return y / (np.pi * (y * y + x * x))


def conj_poisson_kernel_1d(y: float, x) -> np.ndarray:
    """Q_y(x) = x / (pi (y^2 + x^2)); odd in x."""
    if not y > 0:
        raise ParameterError(f"scale y must be positive, got {y}")
    x = np.asarray(x, dtype=np.float64)
    return x / (np.pi * (y * y + x * x))


def _transfer(kind: str, y: float, omega: np.ndarray) -> np.ndarray:
    decay = np.exp(-y * np.abs(omega))
    if kind == "P":
        return decay.astype(np.complex128)
    if kind == "Q":
        return -1j * np.sign(omega) * decay
    if kind == "dP":
        return (-np.abs(omega) * decay).astype(np.complex128)
    if kind == "dQ":
        return 1j * np.sign(omega) * np.abs(omega) * decay
    raise ParameterError(f"unknown filter kind {kind!r}")


def _filter_axis(plane: np.ndarray, kind: str, y: float, axis: int) -> np.ndarray:
    n = plane.shape[axis]
    ext = np.concatenate([plane, np.flip(plane, axis=axis)], axis=axis)
    spectrum = np.fft.fft(ext, axis=axis)
    omega = 2.0 * np.pi * np.fft.fftfreq(2 * n)
    shape = [1] * plane.ndim
    shape[axis] = 2 * n
    out = np.fft.ifft(spectrum * _transfer(kind, y, omega).reshape(shape), axis=axis).real
    index = [slice(None)] * plane.ndim
    index[axis] = slice(0, n)
    return out[tuple(index)]


def filter_separable(plane: np.ndarray, kind_x: str, kind_y: str,
                     scales: ScalePair) -> np.ndarray:
    """Apply a 1D operator along x1 (axis 1, scale y1), then along x2
    (axis 0, scale y2)."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2 or plane.shape[0] == 0 or plane.shape[1] == 0:
        raise ParameterError(f"expected a non-empty 2D plane, got shape {plane.shape}")
    if kind_x not in KINDS or kind_y not in KINDS:
        raise ParameterError(f"unknown filter kind: {kind_x!r}/{kind_y!r}")
    out = _filter_axis(plane, kind_x, scales.y1, axis=1)
    return _filter_axis(out, kind_y, scales.y2, axis=0)


@dataclass(frozen=True)
class CCHSField:
    """The six filtered planes A1..A6 (stacked on axis 0) at one scale pair.

    A1..A3 are the per-channel P/P smoothings; A4, A5, A6 are the Q/P, P/Q
    and Q/Q filtrations of the channel sum.
    """

    planes: np.ndarray  # (6, H, W)
    scales: ScalePair

    def plane(self, k: int) -> np.ndarray:
        """A_k for k in 1..6."""
        return self.planes[k - 1]


@dataclass(frozen=True)
class CCHSScaleDerivatives:
    """Analytic partials of A1..A6 with respect to the two scales."""

    dy1: np.ndarray  # (6, H, W)
    dy2: np.ndarray  # (6, H, W)
    scales: ScalePair


# (kind_x, kind_y) per plane; planes 1-3 filter one channel, 4-6 the channel sum.
_PLANE_KINDS = (("P", "P"), ("P", "P"), ("P", "P"),
                ("Q", "P"), ("P", "Q"), ("Q", "Q"))

_DERIV = {"P": "dP", "Q": "dQ"}


def _plane_sources(img: ColorImage):
    f1, f2, f3 = img.plane(0), img.plane(1), img.plane(2)
    total = f1 + f2 + f3
    return (f1, f2, f3, total, total, total)


def cchs_transform(img: ColorImage, scales: ScalePair) -> CCHSField:
    """Build the six-plane field for an image at the given scales."""
    sources = _plane_sources(img)
    planes = np.stack([
        filter_separable(src, kx, ky, scales)
        for src, (kx, ky) in zip(sources, _PLANE_KINDS)
    ])
    return CCHSField(planes, scales)


def cchs_scale_derivatives(img: ColorImage, scales: ScalePair) -> CCHSScaleDerivatives:
    """Analytic d(A_k)/dy1 and d(A_k)/dy2, via the kernels' y-derivatives."""
    sources = _plane_sources(img)
    dy1 = np.stack([
        filter_separable(src, _DERIV[kx], ky, scales)
        for src, (kx, ky) in zip(sources, _PLANE_KINDS)
    ])
    dy2 = np.stack([
        filter_separable(src, kx, _DERIV[ky], scales)
        for src, (kx, ky) in zip(sources, _PLANE_KINDS)
    ])
    return CCHSScaleDerivatives(dy1, dy2, scales)


def per_channel_qp_pq(img: ColorImage, scales: ScalePair):
    """Per-channel Q/P and P/Q planes (the channelwise split of A4 and A5).

    Returns (qp, pq), each (3, H, W); summing over channels reproduces A4
    and A5 by linearity.
    """
    qp = np.stack([filter_separable(img.plane(i), "Q", "P", scales) for i in range(3)])
    pq = np.stack([filter_separable(img.plane(i), "P", "Q", scales) for i in range(3)])
    return qp, pq


def per_channel_scale_derivs(img: ColorImage, scales: ScalePair):
    """Scale partials of the per-channel planes used by the substitution
    detectors: d(A4^i)/dy1 and d(A5^i)/dy2, each (3, H, W)."""
    dqp_dy1 = np.stack([filter_separable(img.plane(i), "dQ", "P", scales) for i in range(3)])
    dpq_dy2 = np.stack([filter_separable(img.plane(i), "P", "dQ", scales) for i in range(3)])
    return dqp_dy1, dpq_dy2

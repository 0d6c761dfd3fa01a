"""Raster I/O and color-space normalization.

Images are (H, W, 3) float64 arrays with channels normalized to [0, 1] and a
color-space tag. PNG (8/16-bit) goes through OpenCV; binary PPM (P6) is
parsed and written directly. The Lab working space maps L* to [0, 1] via
L/100 and a*, b* via (x + 110) / 220, which covers the sRGB gamut with
margin.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import cv2
import numpy as np

from .algebra import ColorVector
from .exceptions import FormatError, ParameterError

MIN_SIDE = 8

COLORSPACE_SRGB = "srgb"
COLORSPACE_LAB = "lab"
_COLORSPACES = (COLORSPACE_SRGB, COLORSPACE_LAB)

# sRGB -> XYZ (D65, 2 degree observer), IEC 61966-2-1 primaries.
_SRGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])
_WHITE_D65 = np.array([0.95047, 1.0, 1.08883])

_LAB_AB_HALF_RANGE = 110.0


@dataclass
class ColorImage:
    """An (H, W, 3) float raster with a color-space tag.

    Channel values are expected in [0, 1] after normalization; axis 0 is the
    vertical coordinate x2 and axis 1 the horizontal coordinate x1.
    """

    channels: np.ndarray
    colorspace: str = COLORSPACE_SRGB

    def __post_init__(self):
        arr = np.asarray(self.channels, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ParameterError(f"expected (H, W, 3) channels, got {arr.shape}")
        if arr.shape[0] < MIN_SIDE or arr.shape[1] < MIN_SIDE:
            raise ParameterError(
                f"image must be at least {MIN_SIDE}x{MIN_SIDE}, got "
                f"{arr.shape[1]}x{arr.shape[0]}")
        if not np.isfinite(arr).all():
            raise ParameterError("image contains non-finite samples")
        if self.colorspace not in _COLORSPACES:
            raise ParameterError(f"unknown colorspace {self.colorspace!r}")
        self.channels = arr

    @property
    def height(self) -> int:
        return self.channels.shape[0]

    @property
    def width(self) -> int:
        return self.channels.shape[1]

    def plane(self, i: int) -> np.ndarray:
        return self.channels[:, :, i]


def srgb_to_linear(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.where(x <= 0.04045, x / 12.92, ((x + 0.055) / 1.055) ** 2.4)


def linear_to_srgb(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.where(x <= 0.0031308, 12.92 * x, 1.055 * np.maximum(x, 0.0) ** (1 / 2.4) - 0.055)


def _lab_f(t: np.ndarray) -> np.ndarray:
    delta = 6.0 / 29.0
    return np.where(t > delta ** 3, np.cbrt(t), t / (3 * delta * delta) + 4.0 / 29.0)


def srgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    """sRGB in [0, 1] -> CIE L*a*b* (native units: L in [0, 100])."""
    xyz = srgb_to_linear(rgb) @ _SRGB_TO_XYZ.T
    fxyz = _lab_f(xyz / _WHITE_D65)
    lstar = 116.0 * fxyz[..., 1] - 16.0
    astar = 500.0 * (fxyz[..., 0] - fxyz[..., 1])
    bstar = 200.0 * (fxyz[..., 1] - fxyz[..., 2])
    return np.stack([lstar, astar, bstar], axis=-1)


def normalize_lab(lab: np.ndarray) -> np.ndarray:
    """Affinely map native Lab to [0, 1] channels."""
    out = np.empty_like(lab)
    out[..., 0] = lab[..., 0] / 100.0
    out[..., 1] = (lab[..., 1] + _LAB_AB_HALF_RANGE) / (2 * _LAB_AB_HALF_RANGE)
    out[..., 2] = (lab[..., 2] + _LAB_AB_HALF_RANGE) / (2 * _LAB_AB_HALF_RANGE)
    return out


def to_lab(img: ColorImage) -> ColorImage:
    """Convert an sRGB-normalized image to the Lab-normalized working space."""
    if img.colorspace == COLORSPACE_LAB:
        return img
    return ColorImage(normalize_lab(srgb_to_lab(img.channels)), COLORSPACE_LAB)


def color_to_nu(rgb, colorspace: str = COLORSPACE_SRGB) -> ColorVector:
    """Turn a user-facing sRGB triple into a color vector in the working space.

    The triple goes through the same normalization as image channels, so the
    vector and the image live in the same coordinates.
    """
    triple = np.asarray(rgb, dtype=np.float64)
    if triple.shape != (3,) or not np.isfinite(triple).all():
        raise ParameterError("color must be a finite RGB triple")
    if colorspace == COLORSPACE_SRGB:
        return ColorVector(*triple)
    if colorspace == COLORSPACE_LAB:
        lab = normalize_lab(srgb_to_lab(triple[None, None, :]))[0, 0]
        return ColorVector(*lab)
    raise ParameterError(f"unknown colorspace {colorspace!r}")


# --- file formats -----------------------------------------------------------

def load(path) -> ColorImage:
    """Load a PNG or binary PPM as an sRGB-normalized ColorImage."""
    path = str(path)
    if path.lower().endswith((".ppm", ".pnm")):
        return _load_ppm(path)
    raw = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise FormatError(f"cannot read image {path!r}")
    if raw.ndim == 2:
        raw = np.repeat(raw[:, :, None], 3, axis=2)
    if raw.shape[2] == 4:
        raw = raw[:, :, :3]
    raw = raw[:, :, ::-1]  # BGR -> RGB
    if raw.dtype == np.uint8:
        arr = raw.astype(np.float64) / 255.0
    elif raw.dtype == np.uint16:
        arr = raw.astype(np.float64) / 65535.0
    else:
        raise FormatError(f"unsupported PNG sample type {raw.dtype} in {path!r}")
    return ColorImage(arr, COLORSPACE_SRGB)


def save(img: ColorImage, path, bitdepth: int = 16) -> None:
    """Write a ColorImage as PNG or binary PPM; exact for in-gamut values."""
    if bitdepth not in (8, 16):
        raise ParameterError("bitdepth must be 8 or 16")
    path = str(path)
    arr = np.clip(img.channels, 0.0, 1.0)
    if path.lower().endswith((".ppm", ".pnm")):
        _save_ppm(arr, path, bitdepth)
        return
    if bitdepth == 8:
        quant = np.round(arr * 255.0).astype(np.uint8)
    else:
        quant = np.round(arr * 65535.0).astype(np.uint16)
    if not cv2.imwrite(path, quant[:, :, ::-1]):
        raise FormatError(f"cannot write image {path!r}")


def save_gray(plane: np.ndarray, path, bitdepth: int = 16) -> None:
    """Write a single [0, 1] plane as a grayscale PNG."""
    if bitdepth not in (8, 16):
        raise ParameterError("bitdepth must be 8 or 16")
    arr = np.clip(np.asarray(plane, dtype=np.float64), 0.0, 1.0)
    if bitdepth == 8:
        quant = np.round(arr * 255.0).astype(np.uint8)
    else:
        quant = np.round(arr * 65535.0).astype(np.uint16)
    if not cv2.imwrite(str(path), quant):
        raise FormatError(f"cannot write image {path!r}")


def load_gray(path) -> np.ndarray:
    """Load a grayscale (or color, averaged) image as a [0, 1] plane."""
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise FormatError(f"cannot read image {path!r}")
    if raw.ndim == 3:
        raw = raw[:, :, :3].mean(axis=2)
    if raw.dtype == np.uint8:
        return raw.astype(np.float64) / 255.0
    if raw.dtype == np.uint16:
        return raw.astype(np.float64) / 65535.0
    return np.asarray(raw, dtype=np.float64)


def _load_ppm(path: str) -> ColorImage:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P6"):
        raise FormatError(f"{path!r} is not a binary PPM (P6)")
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError as exc:
        raise FormatError(f"malformed PPM header in {path!r}") from exc
    pos += 1  # single whitespace after maxval
    if maxval <= 0 or maxval >= 65536:
        raise FormatError(f"unsupported PPM maxval {maxval} in {path!r}")
    count = width * height * 3
    if maxval < 256:
        pix = np.frombuffer(data, dtype=np.uint8, count=count, offset=pos)
    else:
        pix = np.frombuffer(data, dtype=">u2", count=count, offset=pos)
    if pix.size < count:
        raise FormatError(f"truncated PPM payload in {path!r}")
    arr = pix.reshape(height, width, 3).astype(np.float64) / float(maxval)
    return ColorImage(arr, COLORSPACE_SRGB)


def _save_ppm(arr: np.ndarray, path: str, bitdepth: int) -> None:
    maxval = 255 if bitdepth == 8 else 65535
    quant = np.round(arr * maxval)
    header = f"P6\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode("ascii")
    payload = quant.astype(np.uint8 if bitdepth == 8 else ">u2").tobytes()
    with open(path, "wb") as fh:
        fh.write(header + payload)


# --- optical flow container --------------------------------------------------

FLO_MAGIC = b"PIEH"  # float32 little-endian 202021.25
FLO_UNKNOWN = 1e10


def write_flo(u: np.ndarray, v: np.ndarray, path, valid: np.ndarray | None = None) -> None:
    """Write interleaved float32 (u, v) with the standard 4-byte magic.

    Invalid pixels are stored as the conventional huge sentinel.
    """
    u = np.asarray(u, dtype=np.float32)
    v = np.asarray(v, dtype=np.float32)
    if u.shape != v.shape or u.ndim != 2:
        raise ParameterError("u and v must be 2D planes of equal shape")
    if valid is not None:
        u = np.where(valid, u, np.float32(FLO_UNKNOWN))
        v = np.where(valid, v, np.float32(FLO_UNKNOWN))
    h, w = u.shape
    data = np.empty((h, w, 2), dtype="<f4")
    data[:, :, 0] = u
    data[:, :, 1] = v
    with open(path, "wb") as fh:
        fh.write(FLO_MAGIC)
        fh.write(struct.pack("<ii", w, h))
        fh.write(data.tobytes())


def read_flo(path):
    """Read a flow file; returns (u, v, valid)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != FLO_MAGIC:
            raise FormatError(f"{path!r} is not a flow file (bad magic)")
        w, h = struct.unpack("<ii", fh.read(8))
        data = np.frombuffer(fh.read(w * h * 8), dtype="<f4")
    if data.size != w * h * 2:
        raise FormatError(f"truncated flow file {path!r}")
    data = data.reshape(h, w, 2).astype(np.float64)
    u, v = data[:, :, 0], data[:, :, 1]
    valid = (np.abs(u) < 1e9) & (np.abs(v) < 1e9)
    return np.where(valid, u, 0.0), np.where(valid, v, 0.0), valid

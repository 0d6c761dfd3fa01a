"""The five color-selective edge detectors and non-maximum suppression.

All five magnitudes are eigenvalue functionals of Gram matrices built from
derivative rows of the 2-band feature field (sc, theta):

  ched    largest eigenvalue of the 2x2 spatial metric
  mched   same, with spatial rows substituted by scale expressions
  mased1  eigenvalue sum (trace) of the 4x4 Gram of spatial + scale rows
  mased2  as mased1 with the spatial rows substituted by scale expressions
  mased3  as mased1 with the scale rows substituted by spatial expressions
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .algebra import ColorVector
from .exceptions import ParameterError
from .features import (
    DerivativeBundle,
    FeatureField,
    ScaleSubstitutedSpatials,
    SpatialSubstitutedScales,
    derivative_bundle,
    feature_field,
    scale_substituted_spatials,
    spatial_derivatives,
    spatial_substituted_scales,
)
from .image_io import ColorImage
from .scalespace import (
    ScalePair,
    cchs_scale_derivatives,
    cchs_transform,
    per_channel_qp_pq,
    per_channel_scale_derivs,
)

METHODS = ("ched", "mched", "mased1", "mased2", "mased3")

# Per-method default scales used by the pipeline and the CLI.
DEFAULT_SCALES = {
    "ched": ScalePair(2.0, 2.0),
    "mched": ScalePair(8.0, 8.0),
    "mased1": ScalePair(2.0, 2.0),
    "mased2": ScalePair(2.0, 2.0),
    "mased3": ScalePair(2.0, 2.0),
}

DEFAULT_NMS_RADIUS = 1.5
DEFAULT_THRESHOLD_PERCENTILE = 90.0


@dataclass(frozen=True)
class GradientMap:
    """Generalized gradient magnitude plus an optional direction plane
    (radians in [0, pi), measured from the x1 axis)."""

    magnitude: np.ndarray
    direction: np.ndarray | None = None


@dataclass(frozen=True)
class EdgeMap:
    """Post-suppression binary edges with the radius and threshold used."""

    edges: np.ndarray
    radius: float
    threshold: float


def metric_2x2(d: DerivativeBundle, source: str = "spatial"):
    """Gram entries of the two derivative 2-vectors along each image axis.

    source selects spatial (x1, x2) or scale (y1, y2) rows. Returns
    (g11, g12, g22).
    """
    if source == "spatial":
        r1 = (d.dsc_dx1, d.dth_dx1)
        r2 = (d.dsc_dx2, d.dth_dx2)
    elif source == "scale":
        r1 = (d.dsc_dy1, d.dth_dy1)
        r2 = (d.dsc_dy2, d.dth_dy2)
    else:
        raise ParameterError(f"unknown metric source {source!r}")
    g11 = r1[0] ** 2 + r1[1] ** 2
    g22 = r2[0] ** 2 + r2[1] ** 2
    g12 = r1[0] * r2[0] + r1[1] * r2[1]
    return g11, g12, g22


def lambda_plus(g11, g12, g22):
    """Larger eigenvalue of the symmetric 2x2 metric and its direction.

    lambda+ = (g11 + g22 + sqrt((g11 - g22)^2 + 4 g12^2)) / 2; theta+ is
    half the atan2 of (2 g12, g11 - g22), mapped to [0, pi).
    """
    disc = np.sqrt((g11 - g22) ** 2 + 4.0 * g12 ** 2)
    lam = 0.5 * (g11 + g22 + disc)
    theta = 0.5 * np.arctan2(2.0 * g12, g11 - g22)
    theta = np.where(theta < 0.0, theta + np.pi, theta)
    return lam, theta


def _metric_from_rows(row1, row2):
    g11 = row1[0] ** 2 + row1[1] ** 2
    g22 = row2[0] ** 2 + row2[1] ** 2
    g12 = row1[0] * row2[0] + row1[1] * row2[1]
    return g11, g12, g22


def ched(ff: FeatureField) -> GradientMap:
    """Spatial-metric eigenvalue detector."""
    dsc_dx1, dsc_dx2, dth_dx1, dth_dx2 = spatial_derivatives(ff)
    g11, g12, g22 = _metric_from_rows((dsc_dx1, dth_dx1), (dsc_dx2, dth_dx2))
    lam, theta = lambda_plus(g11, g12, g22)
    return GradientMap(lam, theta)


def mched(ff: FeatureField, subs: ScaleSubstitutedSpatials) -> GradientMap:
    """Substitution detector: the spatial metric rebuilt from the rows
    (B1, D1), (B2, D2) of scale-expressed derivatives."""
    g11, g12, g22 = _metric_from_rows((subs.b1, subs.d1), (subs.b2, subs.d2))
    lam, theta = lambda_plus(g11, g12, g22)
    return GradientMap(lam, theta)


def _gram(rows) -> np.ndarray:
    """(H, W, 4, 4) Gram matrix of four 2-vector rows of planes."""
    vecs = np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)  # (H, W, 4, 2)
    return np.einsum("...id,...kd->...ik", vecs, vecs)


def _bundle_rows(d: DerivativeBundle):
    return [
        (d.dsc_dx1, d.dth_dx1),
        (d.dsc_dx2, d.dth_dx2),
        (d.dsc_dy1, d.dth_dy1),
        (d.dsc_dy2, d.dth_dy2),
    ]


def build_I1(d: DerivativeBundle) -> np.ndarray:
    """Per-pixel 4x4 Gram of the x1, x2, y1, y2 derivative rows (rank <= 2)."""
    return _gram(_bundle_rows(d))


def build_I2(d: DerivativeBundle, subs: ScaleSubstitutedSpatials) -> np.ndarray:
    """As I1 with the spatial rows replaced by their scale expressions."""
    rows = [(subs.b1, subs.d1), (subs.b2, subs.d2),
            (d.dsc_dy1, d.dth_dy1), (d.dsc_dy2, d.dth_dy2)]
    return _gram(rows)


def build_I3(d: DerivativeBundle, subs: SpatialSubstitutedScales) -> np.ndarray:
    """As I1 with the scale rows replaced by their spatial expressions."""
    rows = [(d.dsc_dx1, d.dth_dx1), (d.dsc_dx2, d.dth_dx2),
            (subs.dsc_dy1, subs.dth_dy1), (subs.dsc_dy2, subs.dth_dy2)]
    return _gram(rows)


_JACOBI_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def jacobi_eigh(mats: np.ndarray, tol: float = 1e-12, max_sweeps: int = 50):
    """Cyclic Jacobi eigendecomposition of batched symmetric 4x4 matrices.

    Returns (eigenvalues, eigenvectors) sorted descending per matrix;
    eigenvectors are the columns of the returned (..., 4, 4) array.
    """
    A = np.array(mats, dtype=np.float64, copy=True)
    n = A.shape[-1]
    V = np.zeros_like(A)
    V[..., range(n), range(n)] = 1.0
    scale = max(np.abs(A).max(), 1.0)
    for _ in range(max_sweeps):
        off = 0.0
        for p, q in _JACOBI_PAIRS:
            off = max(off, np.abs(A[..., p, q]).max())
        if off <= tol * scale:
            break
        for p, q in _JACOBI_PAIRS:
            apq = A[..., p, q]
            phi = 0.5 * np.arctan2(2.0 * apq, A[..., q, q] - A[..., p, p])
            c = np.cos(phi)[..., None]
            s = np.sin(phi)[..., None]
            colp = A[..., :, p].copy()
            colq = A[..., :, q].copy()
            A[..., :, p] = c * colp - s * colq
            A[..., :, q] = s * colp + c * colq
            rowp = A[..., p, :].copy()
            rowq = A[..., q, :].copy()
            A[..., p, :] = c * rowp - s * rowq
            A[..., q, :] = s * rowp + c * rowq
            vp = V[..., :, p].copy()
            vq = V[..., :, q].copy()
            V[..., :, p] = c * vp - s * vq
            V[..., :, q] = s * vp + c * vq
    vals = A[..., range(n), range(n)]
    order = np.argsort(-vals, axis=-1)
    vals = np.take_along_axis(vals, order, axis=-1)
    V = np.take_along_axis(V, order[..., None, :], axis=-1)
    return vals, V


def _direction_from_gram(gram: np.ndarray, magnitude: np.ndarray) -> np.ndarray:
    """Spatial projection of the dominant eigenvector, falling back to the
    discrete magnitude gradient where the projection degenerates."""
    _, vecs = jacobi_eigh(gram)
    lead = vecs[..., :, 0]
    proj = lead[..., :2]
    norm = np.hypot(proj[..., 0], proj[..., 1])
    angle = np.arctan2(proj[..., 1], proj[..., 0])
    angle = np.mod(angle, np.pi)
    gx2, gx1 = np.gradient(magnitude)
    fallback = np.mod(np.arctan2(gx2, gx1), np.pi)
    return np.where(norm < 1e-6, fallback, angle)


def mased(variant: int, d: DerivativeBundle,
          subs: ScaleSubstitutedSpatials | None = None,
          spatial_subs: SpatialSubstitutedScales | None = None) -> GradientMap:
    """Eigenvalue-sum detectors over the per-pixel 4x4 Gram matrices.

    The magnitude is the trace (eigenvalue sum); variant 1 also carries the
    spatial projection of the dominant eigenvector as a direction plane.
    """
    if variant == 1:
        rows = _bundle_rows(d)
    elif variant == 2:
        if subs is None:
            raise ParameterError("variant 2 needs the scale-substituted rows")
        rows = [(subs.b1, subs.d1), (subs.b2, subs.d2),
                (d.dsc_dy1, d.dth_dy1), (d.dsc_dy2, d.dth_dy2)]
    elif variant == 3:
        if spatial_subs is None:
            raise ParameterError("variant 3 needs the spatial-substituted rows")
        rows = [(d.dsc_dx1, d.dth_dx1), (d.dsc_dx2, d.dth_dx2),
                (spatial_subs.dsc_dy1, spatial_subs.dth_dy1),
                (spatial_subs.dsc_dy2, spatial_subs.dth_dy2)]
    else:
        raise ParameterError(f"unknown variant {variant}")

    # Eigenvalue sum == trace of the Gram == sum of squared row entries.
    w = np.zeros_like(rows[0][0])
    for r in rows:
        w = w + r[0] ** 2 + r[1] ** 2

    direction = None
    if variant == 1:
        direction = _direction_from_gram(_gram(rows), w)
    return GradientMap(w, direction)


def _bilinear(plane: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    # Clamp to the border value: zero-padding would make every border pixel
    # a spurious strict maximum.
    return ndimage.map_coordinates(plane, [rows, cols], order=1, mode="nearest")


def _directional_max(mag, rows, cols, dx, dy):
    fwd = _bilinear(mag, rows + dy, cols + dx)
    bwd = _bilinear(mag, rows - dy, cols - dx)
    hi = np.maximum(fwd, bwd)
    lo = np.minimum(fwd, bwd)
    # Strict on one side so constant plateaus never survive.
    return (mag >= hi) & (mag > lo)


def nms(gm: GradientMap, radius: float = DEFAULT_NMS_RADIUS,
        threshold_percentile: float = DEFAULT_THRESHOLD_PERCENTILE,
        threshold: float | None = None) -> EdgeMap:
    """Directional non-maximum suppression with bilinear sampling at
    +-radius, plus an adaptive percentile threshold.

    The comparison direction is the map's own direction plane when present,
    otherwise the discrete gradient of the magnitude (with an any-axis test
    where that gradient vanishes). The default threshold keeps magnitudes at
    or above the given percentile of the nonzero magnitudes.
    """
    if not radius > 0:
        raise ParameterError(f"radius must be positive, got {radius}")
    if not 0.0 <= threshold_percentile <= 100.0:
        raise ParameterError("threshold percentile must be in [0, 100]")
    mag = np.asarray(gm.magnitude, dtype=np.float64)
    if threshold is None:
        nonzero = mag[mag > 0]
        thr = float(np.percentile(nonzero, threshold_percentile)) if nonzero.size else np.inf
    else:
        thr = float(threshold)

    h, w = mag.shape
    rows, cols = np.mgrid[0:h, 0:w].astype(np.float64)
    if gm.direction is not None:
        phi = gm.direction
        keep = _directional_max(mag, rows, cols, radius * np.cos(phi),
                                radius * np.sin(phi))
    else:
        gx2, gx1 = np.gradient(mag)
        norm = np.hypot(gx1, gx2)
        phi = np.arctan2(gx2, gx1)
        keep = _directional_max(mag, rows, cols, radius * np.cos(phi),
                                radius * np.sin(phi))
        flat = norm < 1e-12 * max(mag.max(), 1.0)
        if flat.any():
            along_x = _directional_max(mag, rows, cols, radius, 0.0)
            along_y = _directional_max(mag, rows, cols, 0.0, radius)
            keep = np.where(flat, along_x | along_y, keep)

    edges = keep & (mag >= thr)
    return EdgeMap(edges, float(radius), thr)


def detect(img: ColorImage, method: str, nu: ColorVector,
           scales: ScalePair | None = None) -> GradientMap:
    """Run one detector on an image already in the working color space."""
    if method not in METHODS:
        raise ParameterError(f"unknown method {method!r}")
    if scales is None:
        scales = DEFAULT_SCALES[method]
    cchs = cchs_transform(img, scales)
    ff = feature_field(cchs, nu)
    if method == "ched":
        return ched(ff)

    dA = cchs_scale_derivatives(img, scales)
    if method == "mched":
        per_dy = per_channel_scale_derivs(img, scales)
        subs = scale_substituted_spatials(cchs, dA, per_dy, nu, ff)
        return mched(ff, subs)

    bundle = derivative_bundle(ff, cchs, dA)
    if method == "mased1":
        return mased(1, bundle)
    if method == "mased2":
        per_dy = per_channel_scale_derivs(img, scales)
        subs = scale_substituted_spatials(cchs, dA, per_dy, nu, ff)
        return mased(2, bundle, subs=subs)
    per_planes = per_channel_qp_pq(img, scales)
    spatial_subs = spatial_substituted_scales(cchs, per_planes, nu, ff)
    return mased(3, bundle, spatial_subs=spatial_subs)

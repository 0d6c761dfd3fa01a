"""The 2-band feature field (scalar part, local phase) of the
color-projected signal, and its spatial and scale derivative bundles.

All derivative paths funnel through one chain-rule helper that takes six
"derivative of A_k" planes; callers select which planes: the analytic scale
partials for the direct scale path, or their substitutions through the
generalized Cauchy-Riemann relations for the two substitution detectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import ColorVector
from .scalespace import CCHSField, CCHSScaleDerivatives, ScalePair

# Mask threshold factor: pixels with amplitude (or bivector norm) below
# 1e-8 * max amplitude have no defined phase derivative and are zeroed.
MASK_EPS_FACTOR = 1e-8


@dataclass(frozen=True)
class FeatureField:
    """Per-pixel scalar part, phase, amplitude and bivector norm."""

    sc: np.ndarray
    theta: np.ndarray
    amplitude: np.ndarray
    bi_norm: np.ndarray
    nu: ColorVector
    scales: ScalePair

    @property
    def shape(self):
        return self.sc.shape


@dataclass(frozen=True)
class DerivativeBundle:
    """The eight partials of (sc, theta): spatial along x1, x2 and scale
    along y1, y2. Planes are zeroed where the amplitude mask fires."""

    dsc_dx1: np.ndarray
    dsc_dx2: np.ndarray
    dth_dx1: np.ndarray
    dth_dx2: np.ndarray
    dsc_dy1: np.ndarray
    dsc_dy2: np.ndarray
    dth_dy1: np.ndarray
    dth_dy2: np.ndarray


@dataclass(frozen=True)
class ScaleSubstitutedSpatials:
    """Spatial derivatives of (sc, theta) rewritten in scale partials: the
    rows (B1, D1), (B2, D2) of the substitution metric."""

    b1: np.ndarray
    b2: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


@dataclass(frozen=True)
class SpatialSubstitutedScales:
    """Scale derivatives of (sc, theta) rewritten in spatial partials."""

    dsc_dy1: np.ndarray
    dsc_dy2: np.ndarray
    dth_dy1: np.ndarray
    dth_dy2: np.ndarray


def _chromatic_planes(cchs: CCHSField, nu: ColorVector):
    a, b, c = nu.a, nu.b, nu.c
    a1, a2, a3 = cchs.planes[0], cchs.planes[1], cchs.planes[2]
    k1 = a * a2 - b * a1
    k2 = a * a3 - c * a1
    k3 = b * a3 - c * a2
    return k1, k2, k3


def feature_field(cchs: CCHSField, nu: ColorVector) -> FeatureField:
    """Per-pixel product with the color vector, reduced to (sc, theta, M)."""
    a, b, c = nu.a, nu.b, nu.c
    planes = cchs.planes
    sc = a * planes[0] + b * planes[1] + c * planes[2]
    k1, k2, k3 = _chromatic_planes(cchs, nu)
    bi_sq = (k1 * k1 + k2 * k2 + k3 * k3
             + nu.norm_sq * (planes[3] ** 2 + planes[4] ** 2 + planes[5] ** 2))
    bi_norm = np.sqrt(bi_sq)
    theta = np.arctan2(bi_norm, np.abs(sc))
    amplitude = np.hypot(sc, bi_norm)
    return FeatureField(sc, theta, amplitude, bi_norm, nu, cchs.scales)


def amplitude_mask(ff: FeatureField) -> np.ndarray:
    """True where the amplitude is large enough for phase derivatives."""
    eps = MASK_EPS_FACTOR * ff.amplitude.max()
    return ff.amplitude > eps


def spatial_derivatives(ff: FeatureField):
    """Central differences of sc and theta (one-sided at borders).

    Returns (dsc_dx1, dsc_dx2, dth_dx1, dth_dx2); x1 is axis 1.
    """
    dsc_dx2, dsc_dx1 = np.gradient(ff.sc)
    dth_dx2, dth_dx1 = np.gradient(ff.theta)
    return dsc_dx1, dsc_dx2, dth_dx1, dth_dx2


def _chain_derivs(cchs: CCHSField, nu: ColorVector, ff: FeatureField, slots):
    """Chain rule through (sc, |bi|, theta) given six d(A_k) planes.

    slots[k] holds the derivative of A_{k+1} with respect to the variable of
    interest. Returns (dsc, dbi, dth) with the amplitude/bivector mask
    applied (the |bi| and M divisions are undefined there).
    """
    a, b, c = nu.a, nu.b, nu.c
    s1, s2, s3, s4, s5, s6 = slots
    k1, k2, k3 = _chromatic_planes(cchs, nu)
    a4, a5, a6 = cchs.planes[3], cchs.planes[4], cchs.planes[5]

    dsc = a * s1 + b * s2 + c * s3
    dot = (k1 * (a * s2 - b * s1)
           + k2 * (a * s3 - c * s1)
           + k3 * (b * s3 - c * s2)
           + nu.norm_sq * (a4 * s4 + a5 * s5 + a6 * s6))

    eps = MASK_EPS_FACTOR * ff.amplitude.max()
    ok = (ff.amplitude > eps) & (ff.bi_norm > eps)
    safe_bi = np.where(ok, ff.bi_norm, 1.0)
    safe_m2 = np.where(ok, ff.amplitude ** 2, 1.0)
    dbi = np.where(ok, dot / safe_bi, 0.0)
    dth = np.where(ok, (dbi * ff.sc - dsc * ff.bi_norm) / safe_m2, 0.0)
    dsc = np.where(ok, dsc, 0.0)
    return dsc, dbi, dth


def scale_derivatives_analytic(cchs: CCHSField, dA: CCHSScaleDerivatives,
                               nu: ColorVector, ff: FeatureField | None = None):
    """d(sc)/dy_j and d(theta)/dy_j from the analytic plane partials.

    Returns (dsc_dy1, dsc_dy2, dth_dy1, dth_dy2), masked where the
    amplitude or bivector norm vanishes.
    """
    if ff is None:
        ff = feature_field(cchs, nu)
    dsc1, _, dth1 = _chain_derivs(cchs, nu, ff, dA.dy1)
    dsc2, _, dth2 = _chain_derivs(cchs, nu, ff, dA.dy2)
    return dsc1, dsc2, dth1, dth2


def derivative_bundle(ff: FeatureField, cchs: CCHSField,
                      dA: CCHSScaleDerivatives) -> DerivativeBundle:
    """Assemble the mixed bundle: spatial partials by central differences,
    scale partials analytic, all masked where the amplitude vanishes."""
    dsc_dx1, dsc_dx2, dth_dx1, dth_dx2 = spatial_derivatives(ff)
    dsc_dy1, dsc_dy2, dth_dy1, dth_dy2 = scale_derivatives_analytic(cchs, dA, ff.nu, ff)
    ok = amplitude_mask(ff)
    return DerivativeBundle(
        dsc_dx1=np.where(ok, dsc_dx1, 0.0),
        dsc_dx2=np.where(ok, dsc_dx2, 0.0),
        dth_dx1=np.where(ok, dth_dx1, 0.0),
        dth_dx2=np.where(ok, dth_dx2, 0.0),
        dsc_dy1=dsc_dy1, dsc_dy2=dsc_dy2,
        dth_dy1=dth_dy1, dth_dy2=dth_dy2,
    )


def scale_substituted_spatials(cchs: CCHSField, dA: CCHSScaleDerivatives,
                               per_channel_dy, nu: ColorVector,
                               ff: FeatureField | None = None) -> ScaleSubstitutedSpatials:
    """Spatial derivatives of (sc, theta) expressed through scale partials.

    Each d(A_k)/dx_j slot is replaced by its generalized Cauchy-Riemann
    counterpart: the chromatic planes channelwise (d(A_i)/dx1 = d(A4^i)/dy1,
    d(A_i)/dx2 = d(A5^i)/dy2) and the structure planes through the aggregate
    relations. per_channel_dy is the (d(A4^i)/dy1, d(A5^i)/dy2) pair.
    """
    if ff is None:
        ff = feature_field(cchs, nu)
    dqp_dy1, dpq_dy2 = per_channel_dy
    dy1, dy2 = dA.dy1, dA.dy2
    sum_dy1 = dy1[0] + dy1[1] + dy1[2]
    sum_dy2 = dy2[0] + dy2[1] + dy2[2]

    # d/dx1 slots: A_i -> dA4^i/dy1; A4 -> -sum dA_i/dy1; A5 -> dA6/dy1; A6 -> -dA5/dy1
    slots_x1 = (dqp_dy1[0], dqp_dy1[1], dqp_dy1[2], -sum_dy1, dy1[5], -dy1[4])
    # d/dx2 slots: A_i -> dA5^i/dy2; A4 -> dA6/dy2; A5 -> -sum dA_i/dy2; A6 -> -dA4/dy2
    slots_x2 = (dpq_dy2[0], dpq_dy2[1], dpq_dy2[2], dy2[5], -sum_dy2, -dy2[3])

    b1, _, d1 = _chain_derivs(cchs, nu, ff, slots_x1)
    b2, _, d2 = _chain_derivs(cchs, nu, ff, slots_x2)
    return ScaleSubstitutedSpatials(b1=b1, b2=b2, d1=d1, d2=d2)


def _grad_x1(plane: np.ndarray) -> np.ndarray:
    return np.gradient(plane, axis=1)


def _grad_x2(plane: np.ndarray) -> np.ndarray:
    return np.gradient(plane, axis=0)


def spatial_substituted_scales(cchs: CCHSField, per_channel_qp_pq, nu: ColorVector,
                               ff: FeatureField | None = None) -> SpatialSubstitutedScales:
    """Scale derivatives of (sc, theta) expressed through spatial partials.

    The inverse substitution: each d(A_k)/dy_j slot is replaced by central
    differences of the per-channel and aggregate planes via the generalized
    Cauchy-Riemann relations. per_channel_qp_pq is (A4^i, A5^i).
    """
    if ff is None:
        ff = feature_field(cchs, nu)
    qp, pq = per_channel_qp_pq
    planes = cchs.planes
    sum_dx1 = _grad_x1(planes[0] + planes[1] + planes[2])
    sum_dx2 = _grad_x2(planes[0] + planes[1] + planes[2])

    # d/dy1 slots: A_i -> -dA4^i/dx1; A4 -> +sum dA_i/dx1; A5 -> -dA6/dx1; A6 -> +dA5/dx1
    slots_y1 = (-_grad_x1(qp[0]), -_grad_x1(qp[1]), -_grad_x1(qp[2]),
                sum_dx1, -_grad_x1(planes[5]), _grad_x1(planes[4]))
    # d/dy2 slots: A_i -> -dA5^i/dx2; A4 -> -dA6/dx2; A5 -> +sum dA_i/dx2; A6 -> +dA4/dx2
    slots_y2 = (-_grad_x2(pq[0]), -_grad_x2(pq[1]), -_grad_x2(pq[2]),
                -_grad_x2(planes[5]), sum_dx2, _grad_x2(planes[3]))

    dsc1, _, dth1 = _chain_derivs(cchs, nu, ff, slots_y1)
    dsc2, _, dth2 = _chain_derivs(cchs, nu, ff, slots_y2)
    return SpatialSubstitutedScales(dsc_dy1=dsc1, dsc_dy2=dsc2,
                                    dth_dy1=dth1, dth_dy2=dth2)

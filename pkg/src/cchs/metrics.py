"""Image-quality and edge-map agreement measures.

psnr/ssim/fsim operate on [0, 1] grayscale planes; pratt_f compares binary
edge maps. SSIM follows the original formulation (11x11 Gaussian window,
sigma 1.5, K1 = 0.01, K2 = 0.03, sample statistics over the valid region).
FSIM combines log-Gabor phase congruency with Scharr gradient similarity,
weighted by the per-pixel maximum phase congruency.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage, signal

from .detectors import EdgeMap
from .exceptions import ParameterError

PSNR_CAP_DB = 99.0

# Abdou-Pratt scaling constant for the figure of merit.
PRATT_ALPHA = 1.0 / 9.0


def _as_plane(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ParameterError(f"expected a 2D plane, got shape {arr.shape}")
    return arr


def psnr(a, b) -> float:
    """Peak signal-to-noise ratio with peak 1.0, capped at 99 dB."""
    a, b = _as_plane(a), _as_plane(b)
    if a.shape != b.shape:
        raise ParameterError("planes must have equal shape")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, -10.0 * math.log10(mse))


def _gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g = np.exp(-(coords ** 2) / (2.0 * sigma * sigma))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def ssim(a, b, k1: float = 0.01, k2: float = 0.03, data_range: float = 1.0) -> float:
    """Mean structural similarity over the valid-window region."""
    a, b = _as_plane(a), _as_plane(b)
    if a.shape != b.shape:
        raise ParameterError("planes must have equal shape")
    win = _gaussian_window()
    if min(a.shape) < win.shape[0]:
        raise ParameterError("planes are smaller than the 11x11 SSIM window")

    def smooth(x):
        return signal.convolve2d(x, win, mode="valid")

    mu1, mu2 = smooth(a), smooth(b)
    s11 = smooth(a * a) - mu1 * mu1
    s22 = smooth(b * b) - mu2 * mu2
    s12 = smooth(a * b) - mu1 * mu2
    c1 = (k1 * data_range) ** 2
    c2 = (k2 * data_range) ** 2
    num = (2 * mu1 * mu2 + c1) * (2 * s12 + c2)
    den = (mu1 ** 2 + mu2 ** 2 + c1) * (s11 + s22 + c2)
    return float(np.mean(num / den))


# --- FSIM --------------------------------------------------------------------

_FSIM_T_PC = 0.85
_FSIM_T_G = 160.0

_SCHARR_X = np.array([[3.0, 0.0, -3.0],
                      [10.0, 0.0, -10.0],
                      [3.0, 0.0, -3.0]]) / 16.0


def _log_gabor_bank(shape, nscale=4, norient=4, min_wavelength=6.0,
                    mult=2.0, sigma_on_f=0.55, d_theta_on_sigma=1.2):
    rows, cols = shape
    fy = np.fft.fftfreq(rows)[:, None]
    fx = np.fft.fftfreq(cols)[None, :]
    radius = np.hypot(fx, fy)
    radius[0, 0] = 1.0  # silence log(0); the DC bin is zeroed below
    theta = np.arctan2(-fy, fx)
    sin_t, cos_t = np.sin(theta), np.cos(theta)
    theta_sigma = np.pi / norient * d_theta_on_sigma

    radial = []
    for s in range(nscale):
        f0 = 1.0 / (min_wavelength * mult ** s)
        lg = np.exp(-(np.log(radius / f0) ** 2) / (2.0 * np.log(sigma_on_f) ** 2))
        lg[0, 0] = 0.0
        radial.append(lg)

    spreads = []
    for o in range(norient):
        angle = o * np.pi / norient
        ds = sin_t * np.cos(angle) - cos_t * np.sin(angle)
        dc = cos_t * np.cos(angle) + sin_t * np.sin(angle)
        dtheta = np.abs(np.arctan2(ds, dc))
        spreads.append(np.exp(-(dtheta ** 2) / (2.0 * theta_sigma ** 2)))
    return radial, spreads


def phase_congruency(plane: np.ndarray, nscale: int = 4, norient: int = 4,
                     noise_k: float = 2.0, epsilon: float = 1e-4) -> np.ndarray:
    """Kovesi-style phase congruency map over log-Gabor quadrature pairs,
    with per-orientation noise-energy compensation."""
    plane = _as_plane(plane)
    spectrum = np.fft.fft2(plane)
    radial, spreads = _log_gabor_bank(plane.shape, nscale=nscale, norient=norient)
    mult = 2.0

    energy_all = np.zeros_like(plane)
    an_all = np.zeros_like(plane)
    for spread in spreads:
        sum_e = np.zeros_like(plane)
        sum_o = np.zeros_like(plane)
        sum_an = np.zeros_like(plane)
        eo = []
        tau = 0.0
        for s, lg in enumerate(radial):
            response = np.fft.ifft2(spectrum * lg * spread)
            an = np.abs(response)
            eo.append(response)
            sum_e += response.real
            sum_o += response.imag
            sum_an += an
            if s == 0:
                tau = np.median(an) / math.sqrt(math.log(4.0))
        x_energy = np.hypot(sum_e, sum_o) + epsilon
        mean_e = sum_e / x_energy
        mean_o = sum_o / x_energy
        energy = np.zeros_like(plane)
        for response in eo:
            e, o = response.real, response.imag
            energy += e * mean_e + o * mean_o - np.abs(e * mean_o - o * mean_e)
        # Rayleigh-model noise threshold estimated from the finest scale.
        total_tau = tau * (1.0 - (1.0 / mult) ** nscale) / (1.0 - 1.0 / mult)
        noise_mean = total_tau * math.sqrt(math.pi / 2.0)
        noise_sigma = total_tau * math.sqrt((4.0 - math.pi) / 2.0)
        t = (noise_mean + noise_k * noise_sigma) / 1.7
        energy = np.maximum(energy - t, 0.0)
        energy_all += energy
        an_all += sum_an
    return energy_all / (an_all + epsilon)


def _gradient_magnitude(plane: np.ndarray) -> np.ndarray:
    gx = ndimage.convolve(plane, _SCHARR_X, mode="nearest")
    gy = ndimage.convolve(plane, _SCHARR_X.T, mode="nearest")
    return np.hypot(gx, gy)


def fsim(a, b) -> float:
    """Feature similarity between two [0, 1] planes.

    Identical inputs score 1 by construction; the all-flat vs all-flat case
    (no phase congruency anywhere) is defined as 1.
    """
    a, b = _as_plane(a), _as_plane(b)
    if a.shape != b.shape:
        raise ParameterError("planes must have equal shape")
    a255 = a * 255.0
    b255 = b * 255.0
    pc1 = phase_congruency(a255)
    pc2 = phase_congruency(b255)
    g1 = _gradient_magnitude(a255)
    g2 = _gradient_magnitude(b255)
    s_pc = (2 * pc1 * pc2 + _FSIM_T_PC) / (pc1 ** 2 + pc2 ** 2 + _FSIM_T_PC)
    s_g = (2 * g1 * g2 + _FSIM_T_G) / (g1 ** 2 + g2 ** 2 + _FSIM_T_G)
    weight = np.maximum(pc1, pc2)
    total = float(np.sum(weight))
    if total == 0.0:
        return 1.0
    return float(np.sum(s_pc * s_g * weight) / total)


# --- Pratt figure of merit ---------------------------------------------------

def _edge_pixels(m) -> np.ndarray:
    if isinstance(m, EdgeMap):
        return m.edges.astype(bool)
    return np.asarray(m).astype(bool)


def pratt_f(detected, truth, alpha: float = PRATT_ALPHA) -> float:
    """Distance-weighted agreement of a detected edge map against truth.

    F = (1 / max(N_truth, N_detected)) * sum over detected of
    1 / (1 + alpha d^2), d being the Euclidean distance to the nearest
    truth pixel. Not symmetric in its arguments. Two empty maps score 1.
    """
    det = _edge_pixels(detected)
    tru = _edge_pixels(truth)
    if det.shape != tru.shape:
        raise ParameterError("edge maps must have equal shape")
    n_det = int(det.sum())
    n_tru = int(tru.sum())
    if n_tru == 0 and n_det == 0:
        return 1.0
    if n_tru == 0 or n_det == 0:
        return 0.0
    dist = ndimage.distance_transform_edt(~tru)
    score = np.sum(1.0 / (1.0 + alpha * dist[det] ** 2))
    return float(score / max(n_tru, n_det))

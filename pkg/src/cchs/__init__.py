"""Color-selective edge detection and optical flow on a two-scale
hypercomplex analytic signal."""

from .algebra import (
    BLADES,
    CCHSSample,
    CliffordProduct,
    ColorVector,
    clifford_color_product,
    local_amplitude,
    local_phase,
)
from .detectors import (
    DEFAULT_SCALES,
    METHODS,
    EdgeMap,
    GradientMap,
    build_I1,
    build_I2,
    build_I3,
    ched,
    detect,
    lambda_plus,
    mased,
    mched,
    metric_2x2,
    nms,
)
from .features import (
    DerivativeBundle,
    FeatureField,
    derivative_bundle,
    feature_field,
    scale_derivatives_analytic,
    scale_substituted_spatials,
    spatial_derivatives,
    spatial_substituted_scales,
)
from .flow import FlowField, flow_to_color, lk_flow, pretreat
from .image_io import ColorImage, color_to_nu, load, save, to_lab
from .metrics import fsim, pratt_f, psnr, ssim
from .noise import NoiseSpec, corrupt, snr
from .scalespace import (
    CCHSField,
    CCHSScaleDerivatives,
    ScalePair,
    cchs_scale_derivatives,
    cchs_transform,
    conj_poisson_kernel_1d,
    filter_separable,
    poisson_kernel_1d,
)
from .synth import rectangles, step_edge, translated_square_pair

__version__ = "0.1.0"

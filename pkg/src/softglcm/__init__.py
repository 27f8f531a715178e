"""Differentiable co-occurrence texture statistics and reconstruction losses.

The library is organized around a soft, sigmoid-binned relaxation of the
gray-level co-occurrence matrix. The relaxation converges to the exact table
as its steepness grows, is smooth in the input pixels, and powers a
texture-aware reconstruction loss alongside squared error and structural
similarity. A small projected-gradient harness reconstructs masked patches to
demonstrate the gradients end to end, and a CLI exposes reports, sweeps, and
reconstruction runs.
"""

__version__ = "0.1.0"

from .core import (
    DEFAULT_OFFSETS,
    Direction,
    GrayImage,
    HORIZONTAL,
    IntensityConvention,
    OffsetSpec,
    PatchGrid,
    VERTICAL,
    denormalize_image,
    normalize_image,
)
from .errors import (
    ContractError,
    CoverageError,
    DegenerateInputError,
    DegenerateMaskError,
    DimensionError,
    FormatError,
    GeometryError,
    ImageIOError,
    InputDomainError,
    NumericalFailureError,
    SoftGlcmError,
)
from .glcm_exact import (
    CooccurrenceMatrix,
    exact_glcm,
    normalize_glcm,
    offset_pairs,
    quantize,
    symmetrize_glcm,
)
from .glcm_soft import (
    SoftBinningConfig,
    SoftGlcm,
    soft_bin_derivative,
    soft_bin_probabilities,
    soft_glcm_backward,
    soft_glcm_forward,
)
from .haralick import (
    FEATURE_NAMES,
    FeatureDistance,
    HaralickVector,
    feature_distance,
    haralick_features,
)
from .imageio import (
    PadPolicy,
    PatchRef,
    assemble_patches,
    extract_patches,
    load_gray,
    save_pgm,
)
from .losses import (
    LossWeights,
    PhaseSchedule,
    SsimConfig,
    combined_loss,
    glcm_loss,
    mse_loss,
    ssim_loss,
)
from .masking import ConstantFill, MaskPlan, NoiseFill, apply_mask, make_mask
from .recon import (
    ConstantInit,
    NoiseInit,
    ReconConfig,
    ReconTrace,
    TraceRecord,
    VisibleMeanInit,
    blur_probe,
    reconstruct_patches,
    texture_distance,
)

__all__ = [
    "__version__",
    "DEFAULT_OFFSETS",
    "Direction",
    "GrayImage",
    "HORIZONTAL",
    "IntensityConvention",
    "OffsetSpec",
    "PatchGrid",
    "VERTICAL",
    "denormalize_image",
    "normalize_image",
    "SoftGlcmError",
    "InputDomainError",
    "FormatError",
    "ImageIOError",
    "DimensionError",
    "GeometryError",
    "CoverageError",
    "ContractError",
    "DegenerateInputError",
    "DegenerateMaskError",
    "NumericalFailureError",
    "CooccurrenceMatrix",
    "exact_glcm",
    "normalize_glcm",
    "offset_pairs",
    "quantize",
    "symmetrize_glcm",
    "SoftBinningConfig",
    "SoftGlcm",
    "soft_bin_derivative",
    "soft_bin_probabilities",
    "soft_glcm_backward",
    "soft_glcm_forward",
    "FEATURE_NAMES",
    "FeatureDistance",
    "HaralickVector",
    "feature_distance",
    "haralick_features",
    "PadPolicy",
    "PatchRef",
    "assemble_patches",
    "extract_patches",
    "load_gray",
    "save_pgm",
    "LossWeights",
    "PhaseSchedule",
    "SsimConfig",
    "combined_loss",
    "glcm_loss",
    "mse_loss",
    "ssim_loss",
    "ConstantFill",
    "MaskPlan",
    "NoiseFill",
    "apply_mask",
    "make_mask",
    "ConstantInit",
    "NoiseInit",
    "ReconConfig",
    "ReconTrace",
    "TraceRecord",
    "VisibleMeanInit",
    "blur_probe",
    "reconstruct_patches",
    "texture_distance",
]

"""Reconstruction losses over patch sets, each with a closed-form gradient.

Three ingredients: plain per-pixel squared error, a Frobenius penalty between
soft co-occurrence tables, and a structural-similarity term. A weighted
combination with a two-phase schedule (squared error alone first, then all
three) drives the reconstruction harness.

All losses take equal-length sequences of predicted and target patches and
return the scalar value together with the gradient w.r.t. each predicted
patch; targets are treated as constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import convolve2d, correlate2d

from .core import DEFAULT_OFFSETS, OffsetSpec
from .errors import InputDomainError
from .glcm_soft import SoftBinningConfig, soft_glcm_backward, soft_glcm_forward

COMPONENT_NAMES = ("mse", "glcm", "ssim")


@dataclass(frozen=True)
class LossWeights:
    """Multipliers for the three loss components; zero disables a component."""

    mse: float = 1.0
    glcm: float = 0.0
    ssim: float = 0.0

    def __post_init__(self):
        for name in COMPONENT_NAMES:
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InputDomainError(f"weight {name}={v} must be finite and >= 0")

    def as_dict(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in COMPONENT_NAMES}


@dataclass(frozen=True)
class PhaseSchedule:
    """Pixel-only warmup, then the full texture-aware mixture."""

    warmup_steps: int = 400
    warmup: LossWeights = field(default_factory=lambda: LossWeights(1.0, 0.0, 0.0))
    main: LossWeights = field(default_factory=lambda: LossWeights(0.1, 1.0, 1.0))

    def __post_init__(self):
        if self.warmup_steps < 0:
            raise InputDomainError(f"warmup_steps must be >= 0, got {self.warmup_steps}")

    def weights_at(self, step: int) -> LossWeights:
        return self.warmup if step < self.warmup_steps else self.main


@dataclass(frozen=True)
class SsimConfig:
    """Window and stabilizer settings for the structural-similarity term.

    Patches smaller than the window fall back to a single uniform window
    spanning the whole patch.
    """

    window_size: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 2.0

    def __post_init__(self):
        if self.window_size < 2:
            raise InputDomainError(f"window_size must be >= 2, got {self.window_size}")
        if self.sigma <= 0:
            raise InputDomainError(f"sigma must be positive, got {self.sigma}")
        if self.k1 <= 0 or self.k2 <= 0 or self.dynamic_range <= 0:
            raise InputDomainError("k1, k2 and dynamic_range must be positive")

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2

    def kernel_for(self, shape: tuple[int, int]) -> np.ndarray:
        """Normalized Gaussian window, or a uniform one if the patch is small."""
        if min(shape) < self.window_size:
            return np.full(shape, 1.0 / (shape[0] * shape[1]))
        half = (self.window_size - 1) / 2.0
        g = np.exp(-((np.arange(self.window_size) - half) ** 2) / (2.0 * self.sigma**2))
        k = np.outer(g, g)
        return k / k.sum()


def _check_pairs(pred, target):
    if len(pred) != len(target):
        raise InputDomainError(
            f"got {len(pred)} predicted patches but {len(target)} targets"
        )
    if not pred:
        raise InputDomainError("loss over an empty patch set is undefined")
    pairs = []
    for i, (p, t) in enumerate(zip(pred, target)):
        p = np.asarray(p, dtype=np.float64)
        t = np.asarray(t, dtype=np.float64)
        if p.shape != t.shape:
            raise InputDomainError(
                f"patch {i}: predicted shape {p.shape} != target shape {t.shape}"
            )
        pairs.append((p, t))
    return pairs


def mse_loss(pred, target) -> tuple[float, list[np.ndarray]]:
    """Mean over patches of the per-pixel mean squared difference."""
    pairs = _check_pairs(pred, target)
    n = len(pairs)
    value = 0.0
    grads = []
    for p, t in pairs:
        diff = p - t
        value += float(np.mean(diff**2))
        grads.append(2.0 * diff / (n * diff.size))
    return value / n, grads


def glcm_loss(
    pred,
    target,
    config: SoftBinningConfig,
    offsets: tuple[OffsetSpec, ...] = DEFAULT_OFFSETS,
) -> tuple[float, list[np.ndarray]]:
    """Squared Frobenius distance between soft co-occurrence tables.

    Averaged over offsets within a patch and over patches. Both sides are
    soft tables, but only the predicted side receives gradient.
    """
    if not offsets:
        raise InputDomainError("glcm loss needs at least one offset")
    pairs = _check_pairs(pred, target)
    n = len(pairs)
    value = 0.0
    grads = []
    for p, t in pairs:
        grad = np.zeros_like(p)
        for off in offsets:
            g_pred = soft_glcm_forward(p, config, off).table
            g_tgt = soft_glcm_forward(t, config, off).table
            diff = g_pred - g_tgt
            value += float(np.sum(diff**2)) / (n * len(offsets))
            upstream = 2.0 * diff / (n * len(offsets))
            grad += soft_glcm_backward(p, config, off, upstream)
        grads.append(grad)
    return value, grads


def _ssim_patch(p, t, cfg: SsimConfig) -> tuple[float, np.ndarray]:
    """Mean windowed similarity for one patch and d(mean)/d(pred)."""
    w = cfg.kernel_for(p.shape)
    mu_x = correlate2d(p, w, mode="valid")
    mu_y = correlate2d(t, w, mode="valid")
    var_x = correlate2d(p * p, w, mode="valid") - mu_x**2
    var_y = correlate2d(t * t, w, mode="valid") - mu_y**2
    cov = correlate2d(p * t, w, mode="valid") - mu_x * mu_y

    a1 = 2.0 * mu_x * mu_y + cfg.c1
    a2 = 2.0 * cov + cfg.c2
    b1 = mu_x**2 + mu_y**2 + cfg.c1
    b2 = var_x + var_y + cfg.c2
    s = (a1 * a2) / (b1 * b2)

    # Per-window partials of similarity w.r.t. the predicted-side statistics.
    ds_dmu = 2.0 * (mu_y * a2 * b1 - mu_x * a1 * a2) / (b1**2 * b2)
    ds_dvar = -s / b2
    ds_dcov = 2.0 * a1 / (b1 * b2)

    # d(stat)/d(pixel) carries a window weight and, for the variance and
    # covariance, a pixel-dependent factor; split into three scatter fields.
    f_const = ds_dmu - 2.0 * mu_x * ds_dvar - mu_y * ds_dcov
    f_pred = 2.0 * ds_dvar
    f_tgt = ds_dcov
    count = s.size
    grad = (
        convolve2d(f_const, w, mode="full")
        + p * convolve2d(f_pred, w, mode="full")
        + t * convolve2d(f_tgt, w, mode="full")
    ) / count
    return float(np.mean(s)), grad


def ssim_loss(pred, target, config: SsimConfig = SsimConfig()) -> tuple[float, list[np.ndarray]]:
    """One minus the mean structural similarity across patches."""
    pairs = _check_pairs(pred, target)
    n = len(pairs)
    mean_s = 0.0
    grads = []
    for p, t in pairs:
        s, g = _ssim_patch(p, t, config)
        mean_s += s / n
        grads.append(-g / n)
    return 1.0 - mean_s, grads


def combined_loss(
    pred,
    target,
    weights: LossWeights,
    glcm_config: SoftBinningConfig = SoftBinningConfig(),
    offsets: tuple[OffsetSpec, ...] = DEFAULT_OFFSETS,
    ssim_config: SsimConfig = SsimConfig(),
) -> tuple[float, dict[str, float], list[np.ndarray]]:
    """Weighted sum of the enabled components.

    Returns (total, unweighted component values, gradients). Components with
    weight zero are skipped entirely and reported as 0.0.
    """
    pairs = _check_pairs(pred, target)
    total = 0.0
    components = dict.fromkeys(COMPONENT_NAMES, 0.0)
    grads = [np.zeros_like(p) for p, _ in pairs]
    parts = {
        "mse": lambda: mse_loss(pred, target),
        "glcm": lambda: glcm_loss(pred, target, glcm_config, offsets),
        "ssim": lambda: ssim_loss(pred, target, ssim_config),
    }
    for name, run in parts.items():
        weight = getattr(weights, name)
        if weight == 0.0:
            continue
        value, part_grads = run()
        components[name] = value
        total += weight * value
        for acc, g in zip(grads, part_grads):
            acc += weight * g
    return total, components, grads

"""Differentiable co-occurrence matrices via sigmoid soft binning.

Each pixel's level membership is relaxed from a one-hot indicator to the mass
a sigmoid ramp of steepness W assigns to each bin:

    P[n, k] = sigmoid(W * (v_n - mu_k + L/2)) - sigmoid(W * (v_n - mu_k - L/2))

with bin width L = 2 / K and centers mu_k = -1 + (k + 1/2) L. The soft
co-occurrence table for a pixel/neighbor pairing is then (1/N) * P1^T P2,
which approaches the exact table as W grows. Everything here is smooth in the
input intensities, and the backward pass is closed-form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .core import OffsetSpec
from .errors import InputDomainError
from .glcm_exact import offset_pairs


@dataclass(frozen=True)
class SoftBinningConfig:
    """Number of levels and the sigmoid steepness of the soft quantizer."""

    levels: int = 64
    steepness: float = 30.0

    def __post_init__(self):
        if self.levels < 2:
            raise InputDomainError(f"levels must be >= 2, got {self.levels}")
        if not np.isfinite(self.steepness) or self.steepness <= 0:
            raise InputDomainError(f"steepness must be positive, got {self.steepness}")

    @property
    def bin_width(self) -> float:
        return 2.0 / self.levels

    @property
    def centers(self) -> np.ndarray:
        k = np.arange(self.levels, dtype=np.float64)
        return -1.0 + (k + 0.5) * self.bin_width


@dataclass(frozen=True)
class SoftGlcm:
    """Soft co-occurrence table plus the configuration that produced it."""

    table: np.ndarray
    config: SoftBinningConfig
    offset: OffsetSpec
    pair_count: int

    def __post_init__(self):
        arr = np.array(self.table, dtype=np.float64, copy=True)
        arr.flags.writeable = False
        k = self.config.levels
        if arr.shape != (k, k):
            raise InputDomainError(f"table shape {arr.shape} does not match levels {k}")
        object.__setattr__(self, "table", arr)

    @property
    def total_mass(self) -> float:
        return float(self.table.sum())


def soft_bin_probabilities(values: np.ndarray, config: SoftBinningConfig) -> np.ndarray:
    """Membership matrix of shape (len(values), levels); rows sum to just under 1.

    The row sum telescopes to sigmoid(W*(v+1)) - sigmoid(W*(v-1)), so a small
    amount of mass always leaks past the outermost bin edges.
    """
    v = np.asarray(values, dtype=np.float64).ravel()[:, None]
    edges_lo = config.centers - config.bin_width / 2.0
    edges_hi = config.centers + config.bin_width / 2.0
    w = config.steepness
    return expit(w * (v - edges_lo)) - expit(w * (v - edges_hi))


def soft_bin_derivative(values: np.ndarray, config: SoftBinningConfig) -> np.ndarray:
    """d soft_bin_probabilities / d value, same shape as the membership matrix."""
    v = np.asarray(values, dtype=np.float64).ravel()[:, None]
    edges_lo = config.centers - config.bin_width / 2.0
    edges_hi = config.centers + config.bin_width / 2.0
    w = config.steepness
    s_lo = expit(w * (v - edges_lo))
    s_hi = expit(w * (v - edges_hi))
    return w * (s_lo * (1.0 - s_lo) - s_hi * (1.0 - s_hi))


def soft_glcm_forward(
    patch: np.ndarray, config: SoftBinningConfig, offset: OffsetSpec
) -> SoftGlcm:
    """Soft co-occurrence table (1/N) * P_ref^T P_nbr for one displacement."""
    pixels = np.asarray(patch, dtype=np.float64)
    ref, nbr = offset_pairs(pixels, offset)
    p_ref = soft_bin_probabilities(ref, config)
    p_nbr = soft_bin_probabilities(nbr, config)
    table = p_ref.T @ p_nbr / ref.size
    return SoftGlcm(table, config, offset, ref.size)


def soft_glcm_backward(
    patch: np.ndarray,
    config: SoftBinningConfig,
    offset: OffsetSpec,
    upstream: np.ndarray,
) -> np.ndarray:
    """Pull a gradient w.r.t. the soft table back to the patch pixels.

    `upstream` is dLoss/dTable with shape (levels, levels); the result is
    dLoss/dPatch with the patch's shape. Contributions through the reference
    and neighbor roles of each pixel accumulate.
    """
    pixels = np.asarray(patch, dtype=np.float64)
    upstream = np.asarray(upstream, dtype=np.float64)
    k = config.levels
    if upstream.shape != (k, k):
        raise InputDomainError(
            f"upstream gradient shape {upstream.shape} does not match levels {k}"
        )
    ref, nbr = offset_pairs(pixels, offset)
    n = ref.size
    p_ref = soft_bin_probabilities(ref, config)
    p_nbr = soft_bin_probabilities(nbr, config)
    d_ref = soft_bin_derivative(ref, config)
    d_nbr = soft_bin_derivative(nbr, config)

    # dLoss/dP_ref = (1/N) upstream @ P_nbr^T, contracted against dP/dv per pixel
    g_ref = np.einsum("nk,nk->n", p_nbr @ upstream.T, d_ref) / n
    g_nbr = np.einsum("nk,nk->n", p_ref @ upstream, d_nbr) / n

    dr, dc = offset.displacement
    h, w = pixels.shape
    r0 = slice(max(0, -dr), h - max(0, dr))
    c0 = slice(max(0, -dc), w - max(0, dc))
    r1 = slice(max(0, dr), h + min(0, dr))
    c1 = slice(max(0, dc), w + min(0, dc))
    grad = np.zeros_like(pixels)
    grad[r0, c0] += g_ref.reshape(grad[r0, c0].shape)
    grad[r1, c1] += g_nbr.reshape(grad[r1, c1].shape)
    return grad

"""Classical texture statistics over a normalized symmetric co-occurrence table.

The twelve features are the first twelve of Haralick's fourteen; the last two
(second information measure, maximal correlation coefficient) are omitted.
Logarithms are base 2 with the 0*log(0) = 0 convention, and correlation is
defined as 0 when a marginal is degenerate, so every feature is finite on
every valid input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .glcm_exact import CooccurrenceMatrix

FEATURE_NAMES = (
    "angular_second_moment",
    "contrast",
    "correlation",
    "sum_of_squares_variance",
    "inverse_difference_moment",
    "sum_average",
    "sum_variance",
    "sum_entropy",
    "entropy",
    "difference_variance",
    "difference_entropy",
    "information_measure_of_correlation_1",
)

_EPS = 1e-12


@dataclass(frozen=True)
class HaralickVector:
    angular_second_moment: float
    contrast: float
    correlation: float
    sum_of_squares_variance: float
    inverse_difference_moment: float
    sum_average: float
    sum_variance: float
    sum_entropy: float
    entropy: float
    difference_variance: float
    difference_entropy: float
    information_measure_of_correlation_1: float

    def as_dict(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in FEATURE_NAMES}

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES])


@dataclass(frozen=True)
class FeatureDistance:
    """Per-feature |a-b| and |a-b| / max(|b|, eps), keyed by feature name."""

    absolute: dict[str, float]
    relative: dict[str, float]


def _entropy(p: np.ndarray) -> float:
    nz = p[p > 0]
    # Adding 0.0 turns the degenerate -0.0 (from negating a zero sum) into +0.0.
    return float(-np.sum(nz * np.log2(nz))) + 0.0


def _validate(m) -> np.ndarray:
    if isinstance(m, CooccurrenceMatrix):
        if not m.normalized:
            raise ContractError("features require a normalized co-occurrence table")
        table = m.table
    else:
        table = np.asarray(m, dtype=np.float64)
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] < 2:
        raise ContractError(f"expected a square table with K >= 2, got shape {table.shape}")
    if not np.isclose(table.sum(), 1.0, atol=1e-8):
        raise ContractError(f"table sums to {table.sum():.6g}, expected 1")
    if not np.allclose(table, table.T, atol=1e-12):
        raise ContractError("features require a symmetric table; symmetrize first")
    if table.min() < 0:
        raise ContractError("table has negative entries")
    return table


def haralick_features(m) -> HaralickVector:
    """Evaluate the twelve features on a normalized symmetric table."""
    p = _validate(m)
    k = p.shape[0]
    levels = np.arange(k, dtype=np.float64)
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    mu_x = float(levels @ px)
    mu_y = float(levels @ py)
    var_x = float(((levels - mu_x) ** 2) @ px)
    var_y = float(((levels - mu_y) ** 2) @ py)

    # Distributions of the index sum v+w and absolute difference |v-w|.
    vv, ww = np.meshgrid(levels, levels, indexing="ij")
    p_sum = np.zeros(2 * k - 1)
    np.add.at(p_sum, (vv + ww).astype(np.int64), p)
    p_diff = np.zeros(k)
    np.add.at(p_diff, np.abs(vv - ww).astype(np.int64), p)
    sum_idx = np.arange(2 * k - 1, dtype=np.float64)
    diff_idx = levels

    asm = float(np.sum(p**2))
    contrast = float(diff_idx**2 @ p_diff)
    sigma = np.sqrt(var_x * var_y)
    if sigma > 0:
        correlation = float((np.sum(vv * ww * p) - mu_x * mu_y) / sigma)
    else:
        correlation = 0.0
    idm = float(np.sum(p / (1.0 + (vv - ww) ** 2)))
    sum_average = float(sum_idx @ p_sum)
    sum_variance = float(((sum_idx - sum_average) ** 2) @ p_sum)
    diff_mean = float(diff_idx @ p_diff)
    diff_variance = float(((diff_idx - diff_mean) ** 2) @ p_diff)

    hxy = _entropy(p)
    hx = _entropy(px)
    hy = _entropy(py)
    mask = p > 0
    hxy1 = float(-np.sum(p[mask] * np.log2(np.outer(px, py)[mask])))
    denom = max(hx, hy)
    imc1 = (hxy - hxy1) / denom if denom > 0 else 0.0

    return HaralickVector(
        angular_second_moment=asm,
        contrast=contrast,
        correlation=correlation,
        sum_of_squares_variance=var_x,
        inverse_difference_moment=idm,
        sum_average=sum_average,
        sum_variance=sum_variance,
        sum_entropy=_entropy(p_sum),
        entropy=hxy,
        difference_variance=diff_variance,
        difference_entropy=_entropy(p_diff),
        information_measure_of_correlation_1=imc1,
    )


def feature_distance(a: HaralickVector, b: HaralickVector) -> FeatureDistance:
    """Elementwise |a-b| and |a-b| / max(|b|, 1e-12)."""
    absolute = {}
    relative = {}
    for name in FEATURE_NAMES:
        diff = abs(getattr(a, name) - getattr(b, name))
        absolute[name] = diff
        relative[name] = diff / max(abs(getattr(b, name)), _EPS)
    return FeatureDistance(absolute, relative)

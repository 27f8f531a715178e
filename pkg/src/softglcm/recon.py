"""Gradient descent directly on masked-patch pixels.

This is the desk-scale stand-in for a learned decoder: starting from a chosen
initialization, pixels follow the analytic gradient of the combined loss
toward the hidden targets, projected back into [-1, 1] after every step. Patch
gradients are independent, so per-patch work may be fanned out over threads;
results are reduced in patch order and are bit-identical for any thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import gaussian_filter

from .core import DEFAULT_OFFSETS, OffsetSpec
from .errors import InputDomainError, NumericalFailureError
from .glcm_exact import exact_glcm, symmetrize_glcm
from .glcm_soft import SoftBinningConfig
from .haralick import FEATURE_NAMES, feature_distance, haralick_features
from .imageio import PatchRef
from .losses import LossWeights, PhaseSchedule, SsimConfig, combined_loss

CONVERGENCE_THRESHOLD = 1e-8


@dataclass(frozen=True)
class NoiseInit:
    """Start from seeded uniform noise in [-1, 1]."""

    seed: int = 0


@dataclass(frozen=True)
class ConstantInit:
    """Start every pixel at one normalized intensity."""

    value: float = 0.0

    def __post_init__(self):
        if not -1.0 <= self.value <= 1.0:
            raise InputDomainError(f"init value {self.value} outside [-1, 1]")


@dataclass(frozen=True)
class VisibleMeanInit:
    """Start every pixel at the mean intensity of the visible patches."""


@dataclass(frozen=True)
class ReconConfig:
    step_size: float = 0.05
    max_steps: int = 2000
    schedule: PhaseSchedule = field(default_factory=PhaseSchedule)
    offsets: tuple[OffsetSpec, ...] = DEFAULT_OFFSETS
    binning: SoftBinningConfig = field(default_factory=SoftBinningConfig)
    ssim: SsimConfig = field(default_factory=SsimConfig)
    init: NoiseInit | ConstantInit | VisibleMeanInit = field(default_factory=NoiseInit)

    def __post_init__(self):
        if not np.isfinite(self.step_size) or self.step_size <= 0:
            raise InputDomainError(f"step_size must be positive, got {self.step_size}")
        if self.max_steps < 1:
            raise InputDomainError(f"max_steps must be >= 1, got {self.max_steps}")
        if not self.offsets:
            raise InputDomainError("at least one offset is required")


@dataclass(frozen=True)
class TraceRecord:
    step: int
    weights: LossWeights
    total: float
    mse: float
    glcm: float
    ssim: float


@dataclass
class ReconTrace:
    records: list[TraceRecord]
    final_patches: list[np.ndarray]
    final_distance: dict[str, float]

    def rows(self) -> list[dict]:
        return [
            {
                "step": r.step,
                "weight_mse": r.weights.mse,
                "weight_glcm": r.weights.glcm,
                "weight_ssim": r.weights.ssim,
                "total": r.total,
                "mse": r.mse,
                "glcm": r.glcm,
                "ssim": r.ssim,
            }
            for r in self.records
        ]

    def summary(self) -> dict:
        last = self.records[-1]
        return {
            "steps_recorded": len(self.records),
            "final_total": last.total,
            "final_mse": last.mse,
            "final_glcm": last.glcm,
            "final_ssim": last.ssim,
            "final_distance": dict(self.final_distance),
        }


def _as_arrays(targets) -> list[np.ndarray]:
    out = []
    for t in targets:
        arr = t.pixels if isinstance(t, PatchRef) else np.asarray(t, dtype=np.float64)
        out.append(np.array(arr, dtype=np.float64, copy=True))
    if not out:
        raise InputDomainError("need at least one target patch")
    return out


def _initialize(targets: list[np.ndarray], cfg: ReconConfig, visible_mean) -> list[np.ndarray]:
    if isinstance(cfg.init, NoiseInit):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(cfg.init.seed)))
        return [rng.uniform(-1.0, 1.0, size=t.shape) for t in targets]
    if isinstance(cfg.init, ConstantInit):
        return [np.full(t.shape, cfg.init.value) for t in targets]
    if visible_mean is None:
        raise InputDomainError("visible-mean init needs the visible mean intensity")
    value = float(np.clip(visible_mean, -1.0, 1.0))
    return [np.full(t.shape, value) for t in targets]


def texture_distance(
    pred,
    target,
    levels: int = 64,
    offsets: tuple[OffsetSpec, ...] = DEFAULT_OFFSETS,
) -> dict[str, float]:
    """Mean relative feature distance between two patch sets.

    Features come from normalized symmetric exact co-occurrence tables; the
    relative distances are averaged over offsets, then over patches.
    """
    preds = _as_arrays(pred)
    tgts = _as_arrays(target)
    if len(preds) != len(tgts):
        raise InputDomainError(f"{len(preds)} predictions vs {len(tgts)} targets")
    acc = dict.fromkeys(FEATURE_NAMES, 0.0)
    for p, t in zip(preds, tgts):
        for off in offsets:
            fp = haralick_features(symmetrize_glcm(exact_glcm(p, levels, off)))
            ft = haralick_features(symmetrize_glcm(exact_glcm(t, levels, off)))
            rel = feature_distance(fp, ft).relative
            for name in FEATURE_NAMES:
                acc[name] += rel[name] / (len(preds) * len(offsets))
    return acc


def _patch_step(pred, tgt, weights, cfg: ReconConfig):
    total, comps, grads = combined_loss(
        [pred], [tgt], weights, cfg.binning, cfg.offsets, cfg.ssim
    )
    return total, comps, grads[0]


def reconstruct_patches(
    targets,
    cfg: ReconConfig = ReconConfig(),
    *,
    visible_mean: float | None = None,
    threads: int = 1,
) -> tuple[list[np.ndarray], ReconTrace]:
    """Drive initialized patches toward the targets by projected descent.

    Stops after max_steps or once the total loss falls below 1e-8. The trace
    records the loss evaluated at the start of every step taken. A non-finite
    loss or gradient raises a numerical-failure error naming the step.
    """
    if threads < 1:
        raise InputDomainError(f"threads must be >= 1, got {threads}")
    tgts = _as_arrays(targets)
    preds = _initialize(tgts, cfg, visible_mean)
    n = len(tgts)
    records: list[TraceRecord] = []

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for step in range(cfg.max_steps):
            weights = cfg.schedule.weights_at(step)
            step_fn = lambda pair: _patch_step(pair[0], pair[1], weights, cfg)
            if pool is None:
                results = [step_fn(pair) for pair in zip(preds, tgts)]
            else:
                results = list(pool.map(step_fn, zip(preds, tgts)))

            total = sum(r[0] for r in results) / n
            comps = {
                name: sum(r[1][name] for r in results) / n
                for name in ("mse", "glcm", "ssim")
            }
            grads = [r[2] / n for r in results]
            finite = np.isfinite(total) and all(np.all(np.isfinite(g)) for g in grads)
            if not finite:
                raise NumericalFailureError(
                    f"non-finite loss or gradient at step {step}",
                    step=step,
                    components=comps,
                )
            records.append(
                TraceRecord(step, weights, total, comps["mse"], comps["glcm"], comps["ssim"])
            )
            if total < CONVERGENCE_THRESHOLD:
                break
            preds = [
                np.clip(p - cfg.step_size * g, -1.0, 1.0) for p, g in zip(preds, grads)
            ]
    finally:
        if pool is not None:
            pool.shutdown()

    distance = texture_distance(preds, tgts, cfg.binning.levels, cfg.offsets)
    return preds, ReconTrace(records, preds, distance)


def blur_probe(
    target,
    sigma: float,
    binning: SoftBinningConfig = SoftBinningConfig(),
    offsets: tuple[OffsetSpec, ...] = DEFAULT_OFFSETS,
    ssim: SsimConfig = SsimConfig(),
) -> dict[str, float]:
    """Loss components of a Gaussian-blurred patch against its original.

    Quantifies how much each loss term punishes blur: squared error barely
    moves while the co-occurrence distance responds strongly.
    """
    if not np.isfinite(sigma) or sigma <= 0:
        raise InputDomainError(f"sigma must be positive, got {sigma}")
    arr = _as_arrays([target])[0]
    blurred = np.clip(gaussian_filter(arr, sigma=sigma, mode="reflect"), -1.0, 1.0)
    _, comps, _ = combined_loss(
        [blurred], [arr], LossWeights(1.0, 1.0, 1.0), binning, offsets, ssim
    )
    return comps

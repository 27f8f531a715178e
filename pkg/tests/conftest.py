"""Shared oracles and fixture corpora for the test suite.

The naive co-occurrence enumeration and the finite-difference helper are
deliberately written from scratch (no calls into the package internals they
check) so they can serve as independent references.
"""

import numpy as np
from scipy.ndimage import gaussian_filter

from softglcm import Direction, OffsetSpec


def naive_glcm(patch: np.ndarray, levels: int, offset: OffsetSpec) -> np.ndarray:
    """Double-loop ordered pair counting; integer counts, no normalization."""
    dr, dc = offset.direction.step
    dr, dc = dr * offset.distance, dc * offset.distance
    h, w = patch.shape
    q = np.empty((h, w), dtype=np.int64)
    for i in range(h):
        for j in range(w):
            level = int(np.floor(levels * (patch[i, j] + 1.0) / 2.0))
            q[i, j] = min(max(level, 0), levels - 1)
    table = np.zeros((levels, levels), dtype=np.int64)
    for i in range(h):
        for j in range(w):
            ni, nj = i + dr, j + dc
            if 0 <= ni < h and 0 <= nj < w:
                table[q[i, j], q[ni, nj]] += 1
    return table


def numeric_gradient(fn, patch: np.ndarray, h: float) -> np.ndarray:
    """Central finite differences of a scalar function of one patch."""
    out = np.zeros_like(patch)
    for i in range(patch.shape[0]):
        for j in range(patch.shape[1]):
            d = np.zeros_like(patch)
            d[i, j] = h
            out[i, j] = (fn(patch + d) - fn(patch - d)) / (2.0 * h)
    return out


def relative_gradient_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(numeric))), 1e-12)
    return float(np.max(np.abs(analytic - numeric))) / scale


def convergence_corpus(size: int = 128):
    """Twenty seeded patches whose pair densities are smooth at the bin scale.

    Mixes iid noise with striped, checkered, grating and spatially filtered
    textures; amplitudes keep the intensity spread within a few bins of the
    K=64 quantizer so the soft table can track the exact one closely.
    """
    x = np.arange(size)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    patches = []
    for i in range(8):
        rng = np.random.default_rng(100 + i)
        sig = 0.09 if i % 2 == 0 else 0.11
        patches.append((f"blob{i}", np.clip(rng.normal(0.0, sig, (size, size)), -1, 1)))
    for i in range(4):
        rng = np.random.default_rng(200 + i)
        f = gaussian_filter(rng.normal(0.0, 1.0, (size, size)), 1.5, mode="wrap")
        patches.append((f"filtered{i}", np.clip(f / f.std() * 0.12, -1, 1)))
    for i in range(4):
        rng = np.random.default_rng(300 + i)
        base = 0.06 * np.where((xx // 8) % 2 == 0, 1.0, -1.0)
        patches.append(
            (f"stripes{i}", np.clip(base + rng.normal(0.0, 0.08, (size, size)), -1, 1))
        )
    for i in range(2):
        rng = np.random.default_rng(400 + i)
        base = 0.08 * np.where(((xx // 8) + (yy // 8)) % 2 == 0, 1.0, -1.0)
        patches.append(
            (f"checker{i}", np.clip(base + rng.normal(0.0, 0.09, (size, size)), -1, 1))
        )
    for i in range(2):
        rng = np.random.default_rng(500 + i)
        base = 0.10 * np.sin(2.0 * np.pi * 4.0 * xx / size)
        patches.append(
            (f"grating{i}", np.clip(base + rng.normal(0.0, 0.08, (size, size)), -1, 1))
        )
    return patches


def contrast_textures(side: int = 16):
    """Five seeded 16x16 textures for the reconstruction contrast experiment."""
    x = np.arange(side)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    out = []
    rng = np.random.default_rng(11)
    out.append(
        ("stripes_fine", np.clip(
            0.45 * np.where((xx // 2) % 2 == 0, 1.0, -1.0)
            + rng.normal(0, 0.15, (side, side)), -0.95, 0.95))
    )
    rng = np.random.default_rng(12)
    out.append(
        ("stripes_wide", np.clip(
            0.45 * np.where((yy // 4) % 2 == 0, 1.0, -1.0)
            + rng.normal(0, 0.15, (side, side)), -0.95, 0.95))
    )
    rng = np.random.default_rng(13)
    out.append(
        ("checkerboard", np.clip(
            0.45 * np.where(((xx // 2) + (yy // 2)) % 2 == 0, 1.0, -1.0)
            + rng.normal(0, 0.15, (side, side)), -0.95, 0.95))
    )
    for i, s in enumerate((1.0, 1.5)):
        rng = np.random.default_rng(14 + i)
        f = gaussian_filter(rng.normal(0, 1, (side, side)), s, mode="wrap")
        out.append((f"filtered_noise_{i}", np.clip(f / f.std() * 0.45, -0.95, 0.95)))
    return out

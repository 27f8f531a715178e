"""Exact (hard-binned) gray-level co-occurrence matrices.

Intensities in [-1, 1] are quantized to K levels, then ordered pixel pairs at
a fixed displacement are counted into a K x K table. Entry (v, w) counts pairs
whose reference pixel quantizes to level v and whose neighbor quantizes to w;
pairs are ordered, so the raw table is not symmetric in general.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GrayImage, OffsetSpec
from .errors import GeometryError, InputDomainError


@dataclass(frozen=True)
class CooccurrenceMatrix:
    """A K x K co-occurrence table with its provenance fixed at build time."""

    table: np.ndarray
    levels: int
    offset: OffsetSpec
    pair_count: int
    normalized: bool

    def __post_init__(self):
        arr = np.array(self.table, dtype=np.float64, copy=True)
        arr.flags.writeable = False
        if arr.shape != (self.levels, self.levels):
            raise InputDomainError(
                f"table shape {arr.shape} does not match levels {self.levels}"
            )
        object.__setattr__(self, "table", arr)


def quantize(pixels: np.ndarray, levels: int) -> np.ndarray:
    """Map normalized intensities to integer levels 0..levels-1.

    The interval [-1, 1] is cut into `levels` equal bins; the closed right
    endpoint t = 1 belongs to the top bin.
    """
    if levels < 2:
        raise InputDomainError(f"levels must be >= 2, got {levels}")
    idx = np.floor(levels * (np.asarray(pixels, dtype=np.float64) + 1.0) / 2.0)
    return np.clip(idx, 0, levels - 1).astype(np.int64)


def offset_pairs(pixels: np.ndarray, offset: OffsetSpec) -> tuple[np.ndarray, np.ndarray]:
    """Flattened (reference, neighbor) intensity vectors for one displacement.

    Both vectors enumerate, in row-major order, every pixel whose displaced
    partner also lies inside the array.
    """
    dr, dc = offset.displacement
    h, w = pixels.shape
    if abs(dr) >= h or abs(dc) >= w:
        raise GeometryError(
            f"displacement ({dr}, {dc}) leaves no pairs in a {h}x{w} patch"
        )
    r0 = slice(max(0, -dr), h - max(0, dr))
    c0 = slice(max(0, -dc), w - max(0, dc))
    r1 = slice(max(0, dr), h + min(0, dr))
    c1 = slice(max(0, dc), w + min(0, dc))
    return pixels[r0, c0].ravel(), pixels[r1, c1].ravel()


def exact_glcm(
    img: GrayImage | np.ndarray,
    levels: int,
    offset: OffsetSpec,
    normalized: bool = True,
) -> CooccurrenceMatrix:
    """Count co-occurrences of quantized levels at one displacement."""
    pixels = img.pixels if isinstance(img, GrayImage) else np.asarray(img, dtype=np.float64)
    q = quantize(pixels, levels)
    ref, nbr = offset_pairs(q, offset)
    table = np.zeros((levels, levels))
    np.add.at(table, (ref, nbr), 1.0)
    if normalized:
        table /= ref.size
    return CooccurrenceMatrix(table, levels, offset, ref.size, normalized)


def normalize_glcm(glcm: CooccurrenceMatrix) -> CooccurrenceMatrix:
    """Scale counts so entries sum to one; no-op on an already normalized table."""
    if glcm.normalized:
        return glcm
    return CooccurrenceMatrix(
        glcm.table / glcm.pair_count, glcm.levels, glcm.offset, glcm.pair_count, True
    )


def symmetrize_glcm(glcm: CooccurrenceMatrix) -> CooccurrenceMatrix:
    """Average the table with its transpose, making pair order irrelevant."""
    return CooccurrenceMatrix(
        (glcm.table + glcm.table.T) / 2.0,
        glcm.levels,
        glcm.offset,
        glcm.pair_count,
        glcm.normalized,
    )

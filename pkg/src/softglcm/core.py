"""Shared domain types and the intensity-normalization convention.

All pixel data in this package lives in the normalized range [-1, 1].
Raw integer images with G gray levels are mapped through the affine bijection
v_norm = 2*v_raw/(G-1) - 1, which places the G levels on an even grid whose
total span (length 2) matches the soft-binning layout used downstream.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InputDomainError


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class GrayImage:
    """A 2-D grid of normalized gray intensities in [-1, 1].

    The pixel array is copied on construction and marked read-only, so
    instances are safe to share across threads.
    """

    pixels: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.pixels)
        if arr.ndim != 2:
            raise InputDomainError(f"expected a 2-D pixel grid, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputDomainError(f"image dimensions must be >= 1, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputDomainError("image contains non-finite intensities")
        if arr.min() < -1.0 or arr.max() > 1.0:
            bad = np.unravel_index(int(np.argmax(np.abs(arr))), arr.shape)
            raise InputDomainError(
                f"intensity {arr[bad]} at (row={bad[0]}, col={bad[1]}) outside [-1, 1]"
            )
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape


@dataclass(frozen=True)
class IntensityConvention:
    """Affine bijection between raw levels {0..G-1} and the normalized grid.

    source_depth is the gray-level count G of the raw file (256 for 8-bit).
    """

    source_depth: int

    def __post_init__(self):
        if self.source_depth < 2:
            raise InputDomainError(f"source depth must be >= 2, got {self.source_depth}")

    def to_normalized(self, raw: np.ndarray) -> np.ndarray:
        return 2.0 * np.asarray(raw, dtype=np.float64) / (self.source_depth - 1) - 1.0

    def to_raw(self, normalized: np.ndarray) -> np.ndarray:
        """Inverse map with round-half-to-even, clamped to [0, G-1]."""
        scaled = (np.asarray(normalized, dtype=np.float64) + 1.0) * (self.source_depth - 1) / 2.0
        return np.clip(np.rint(scaled), 0, self.source_depth - 1).astype(np.int64)


class Direction(enum.Enum):
    """Co-occurrence pair direction, expressed in (row, col) index space.

    Angles follow the matrix convention (rows grow downward): the horizontal
    neighbor is d columns to the right, the vertical neighbor d rows below.
    """

    HORIZONTAL_0 = (0, 1)
    VERTICAL_90 = (1, 0)
    DIAG_45 = (1, 1)
    DIAG_135 = (1, -1)

    @property
    def step(self) -> tuple[int, int]:
        return self.value


@dataclass(frozen=True)
class OffsetSpec:
    """Pair geometry: a distance in pixels and one of the four directions."""

    distance: int = 1
    direction: Direction = Direction.HORIZONTAL_0

    def __post_init__(self):
        if self.distance < 1:
            raise InputDomainError(f"offset distance must be >= 1, got {self.distance}")
        if not isinstance(self.direction, Direction):
            raise InputDomainError(f"unknown direction {self.direction!r}")

    @property
    def displacement(self) -> tuple[int, int]:
        dr, dc = self.direction.step
        return (dr * self.distance, dc * self.distance)


HORIZONTAL = OffsetSpec(1, Direction.HORIZONTAL_0)
VERTICAL = OffsetSpec(1, Direction.VERTICAL_90)

# Offsets entering texture losses and default feature extraction.
DEFAULT_OFFSETS = (HORIZONTAL, VERTICAL)


@dataclass(frozen=True)
class PatchGrid:
    """Layout of square patches tiling an image exactly."""

    patch_size: int
    rows: int
    cols: int

    def __post_init__(self):
        if self.patch_size < 1:
            raise DimensionError(f"patch size must be >= 1, got {self.patch_size}")
        if self.rows < 1 or self.cols < 1:
            raise DimensionError(f"grid must be non-empty, got {self.rows}x{self.cols}")

    @property
    def total(self) -> int:
        return self.rows * self.cols

    @property
    def image_shape(self) -> tuple[int, int]:
        return (self.rows * self.patch_size, self.cols * self.patch_size)


def normalize_image(raw: np.ndarray, depth: int) -> GrayImage:
    """Map a raw integer grid with values in [0, depth-1] to a GrayImage."""
    conv = IntensityConvention(depth)
    arr = np.asarray(raw)
    bad = (arr < 0) | (arr > depth - 1)
    if np.any(bad):
        r, c = np.argwhere(bad)[0]
        raise InputDomainError(
            f"raw value {arr[r, c]} at (row={r}, col={c}) outside [0, {depth - 1}]"
        )
    return GrayImage(conv.to_normalized(arr))


def denormalize_image(img: GrayImage, depth: int) -> np.ndarray:
    """Inverse of normalize_image; clamping absorbs numerical drift."""
    return IntensityConvention(depth).to_raw(img.pixels)

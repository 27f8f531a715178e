"""Seeded uniform patch masking over a patch grid.

Mask selection is pinned to one concrete algorithm so plans reproduce across
platforms: a Philox 4x64-10 counter generator keyed with the seed feeds a
rejection sampler for bounded integers, which drives a partial Fisher-Yates
shuffle over row-major cell indices. The first round(ratio * total) entries of
the shuffle are the masked cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GrayImage, PatchGrid
from .errors import ContractError, DegenerateMaskError, InputDomainError
from .imageio import PatchRef, extract_patches


@dataclass(frozen=True)
class MaskPlan:
    """Which grid cells are hidden, plus the sampling provenance."""

    grid: PatchGrid
    masked: frozenset[tuple[int, int]]
    ratio: float
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "masked", frozenset(self.masked))
        if not 0.0 < self.ratio < 1.0:
            raise InputDomainError(f"mask ratio must be in (0, 1), got {self.ratio}")
        for r, c in self.masked:
            if not (0 <= r < self.grid.rows and 0 <= c < self.grid.cols):
                raise InputDomainError(f"masked cell ({r}, {c}) outside grid")
        expect = round(self.ratio * self.grid.total)
        if len(self.masked) != expect:
            raise InputDomainError(
                f"plan has {len(self.masked)} masked cells, expected {expect}"
            )

    @property
    def visible(self) -> frozenset[tuple[int, int]]:
        all_cells = {
            (r, c) for r in range(self.grid.rows) for c in range(self.grid.cols)
        }
        return frozenset(all_cells - self.masked)

    def to_json_dict(self) -> dict:
        return {
            "grid": {
                "patch_size": self.grid.patch_size,
                "rows": self.grid.rows,
                "cols": self.grid.cols,
            },
            "ratio": self.ratio,
            "seed": self.seed,
            "masked": sorted(list(c) for c in self.masked),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MaskPlan":
        grid = PatchGrid(**data["grid"])
        masked = frozenset((r, c) for r, c in data["masked"])
        return cls(grid, masked, data["ratio"], data["seed"])


class _BoundedDraws:
    """Rejection-sampled integers in [0, n) from raw Philox 64-bit words."""

    def __init__(self, seed: int):
        self._bitgen = np.random.Philox(key=np.uint64(seed))

    def below(self, n: int) -> int:
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            word = int(self._bitgen.random_raw())
            if word < limit:
                return word % n


def make_mask(grid: PatchGrid, ratio: float, seed: int) -> MaskPlan:
    """Sample round(ratio * total) distinct cells uniformly without replacement."""
    if not 0.0 < ratio < 1.0:
        raise InputDomainError(f"mask ratio must be in (0, 1), got {ratio}")
    if not 0 <= seed < (1 << 64):
        raise InputDomainError(f"seed must fit in 64 unsigned bits, got {seed}")
    total = grid.total
    count = round(ratio * total)
    if count in (0, total):
        raise DegenerateMaskError(
            f"ratio {ratio} on a {grid.rows}x{grid.cols} grid would mask "
            f"{count} of {total} cells"
        )
    draws = _BoundedDraws(seed)
    indices = list(range(total))
    for i in range(count):
        j = i + draws.below(total - i)
        indices[i], indices[j] = indices[j], indices[i]
    masked = frozenset(divmod(idx, grid.cols) for idx in indices[:count])
    return MaskPlan(grid, masked, ratio, seed)


@dataclass(frozen=True)
class NoiseFill:
    """Replace masked pixels with seeded uniform noise in [-1, 1]."""

    seed: int

    def fill(self, shape: tuple[int, int]) -> np.ndarray:
        rng = np.random.Generator(np.random.Philox(key=np.uint64(self.seed)))
        return rng.uniform(-1.0, 1.0, size=shape)


@dataclass(frozen=True)
class ConstantFill:
    """Replace masked pixels with one normalized intensity."""

    value: float = 0.0

    def __post_init__(self):
        if not -1.0 <= self.value <= 1.0:
            raise InputDomainError(f"fill value {self.value} outside [-1, 1]")

    def fill(self, shape: tuple[int, int]) -> np.ndarray:
        return np.full(shape, self.value)


def apply_mask(
    img: GrayImage, plan: MaskPlan, fill
) -> tuple[list[PatchRef], list[PatchRef], GrayImage]:
    """Split an image into visible and masked patches and corrupt the latter.

    Returns (visible patches, original masked patches, corrupted image). The
    corrupted image equals the input with every masked cell replaced by the
    fill policy's pixels; a single fill field is generated for the whole image
    so noise fill does not repeat across cells.
    """
    patches, grid = extract_patches(img, plan.grid.patch_size)
    if grid != plan.grid:
        raise ContractError(
            f"plan grid {plan.grid} does not match image grid {grid}"
        )
    field = fill.fill(grid.image_shape)
    corrupted = img.pixels.copy()
    visible: list[PatchRef] = []
    targets: list[PatchRef] = []
    p = grid.patch_size
    for patch in patches:
        cell = (patch.grid_row, patch.grid_col)
        if cell in plan.masked:
            targets.append(patch)
            rows = slice(cell[0] * p, (cell[0] + 1) * p)
            cols = slice(cell[1] * p, (cell[1] + 1) * p)
            corrupted[rows, cols] = field[rows, cols]
        else:
            visible.append(patch)
    return visible, targets, GrayImage(corrupted)

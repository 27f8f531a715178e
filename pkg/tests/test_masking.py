import json

import numpy as np
import pytest

from softglcm import (
    ConstantFill,
    ContractError,
    DegenerateMaskError,
    GrayImage,
    InputDomainError,
    MaskPlan,
    NoiseFill,
    PatchGrid,
    apply_mask,
    assemble_patches,
    make_mask,
)


class TestMakeMask:
    def test_masked_count_is_rounded_ratio(self):
        plan = make_mask(PatchGrid(16, 14, 14), 0.75, seed=0)
        assert len(plan.masked) == 147

    def test_same_seed_same_plan(self):
        grid = PatchGrid(8, 6, 5)
        a = make_mask(grid, 0.75, seed=42)
        b = make_mask(grid, 0.75, seed=42)
        assert a == b

    def test_different_seeds_differ(self):
        grid = PatchGrid(8, 10, 10)
        assert make_mask(grid, 0.5, 1).masked != make_mask(grid, 0.5, 2).masked

    def test_cells_within_grid_and_distinct(self):
        grid = PatchGrid(4, 7, 3)
        plan = make_mask(grid, 0.6, seed=9)
        assert all(0 <= r < 7 and 0 <= c < 3 for r, c in plan.masked)
        assert len(plan.masked) == round(0.6 * 21)

    def test_degenerate_requests_rejected(self):
        with pytest.raises(DegenerateMaskError):
            make_mask(PatchGrid(16, 1, 1), 0.75, seed=0)
        with pytest.raises(DegenerateMaskError):
            make_mask(PatchGrid(16, 2, 2), 0.95, seed=0)
        with pytest.raises(InputDomainError):
            make_mask(PatchGrid(16, 2, 2), 1.5, seed=0)

    def test_visible_partitions_grid(self):
        grid = PatchGrid(4, 5, 5)
        plan = make_mask(grid, 0.4, seed=3)
        assert plan.masked | plan.visible == {
            (r, c) for r in range(5) for c in range(5)
        }
        assert not plan.masked & plan.visible

    def test_sampling_is_uniform_over_cells(self):
        """Per-cell frequency over many seeds stays within 3 sigma of binomial."""
        grid = PatchGrid(2, 4, 4)
        trials = 10_000
        ratio = 0.5
        counts = np.zeros((4, 4))
        for seed in range(trials):
            for r, c in make_mask(grid, ratio, seed).masked:
                counts[r, c] += 1
        p = round(ratio * grid.total) / grid.total
        sigma = np.sqrt(trials * p * (1 - p))
        assert np.all(np.abs(counts - trials * p) < 3.0 * sigma)


class TestMaskPlanSerialization:
    def test_json_round_trip(self):
        plan = make_mask(PatchGrid(16, 4, 4), 0.75, seed=11)
        data = json.loads(json.dumps(plan.to_json_dict()))
        assert MaskPlan.from_json_dict(data) == plan

    def test_invariant_enforced_on_construction(self):
        grid = PatchGrid(4, 2, 2)
        with pytest.raises(InputDomainError, match="expected"):
            MaskPlan(grid, frozenset({(0, 0)}), 0.75, seed=0)
        with pytest.raises(InputDomainError, match="outside"):
            MaskPlan(grid, frozenset({(0, 0), (5, 0), (1, 1)}), 0.75, seed=0)


class TestApplyMask:
    def test_constant_fill_zeroes_masked_regions(self):
        rng = np.random.default_rng(1)
        img = GrayImage(rng.uniform(-1, 1, (8, 8)))
        plan = make_mask(PatchGrid(2, 4, 4), 0.5, seed=5)
        visible, targets, corrupted = apply_mask(img, plan, ConstantFill(0.0))
        for r, c in plan.masked:
            block = corrupted.pixels[r * 2 : r * 2 + 2, c * 2 : c * 2 + 2]
            assert np.all(block == 0.0)
        assert len(visible) + len(targets) == 16

    def test_visible_patches_untouched(self):
        rng = np.random.default_rng(2)
        img = GrayImage(rng.uniform(-1, 1, (8, 8)))
        plan = make_mask(PatchGrid(2, 4, 4), 0.5, seed=6)
        visible, _, corrupted = apply_mask(img, plan, ConstantFill(0.3))
        for p in visible:
            block = img.pixels[
                p.grid_row * 2 : p.grid_row * 2 + 2, p.grid_col * 2 : p.grid_col * 2 + 2
            ]
            assert np.array_equal(p.pixels, block)
            assert np.array_equal(
                corrupted.pixels[
                    p.grid_row * 2 : p.grid_row * 2 + 2,
                    p.grid_col * 2 : p.grid_col * 2 + 2,
                ],
                block,
            )

    def test_targets_restore_original(self):
        rng = np.random.default_rng(3)
        img = GrayImage(rng.uniform(-1, 1, (12, 12)))
        plan = make_mask(PatchGrid(4, 3, 3), 0.5, seed=7)
        visible, targets, _ = apply_mask(img, plan, NoiseFill(0))
        grid = plan.grid
        restored = assemble_patches(list(visible) + list(targets), grid)
        assert np.array_equal(restored.pixels, img.pixels)

    def test_noise_fill_reproducible(self):
        rng = np.random.default_rng(4)
        img = GrayImage(rng.uniform(-1, 1, (8, 8)))
        plan = make_mask(PatchGrid(2, 4, 4), 0.5, seed=8)
        a = apply_mask(img, plan, NoiseFill(123))[2]
        b = apply_mask(img, plan, NoiseFill(123))[2]
        c = apply_mask(img, plan, NoiseFill(124))[2]
        assert np.array_equal(a.pixels, b.pixels)
        assert not np.array_equal(a.pixels, c.pixels)

    def test_grid_mismatch_rejected(self):
        img = GrayImage(np.zeros((8, 8)))
        plan = make_mask(PatchGrid(2, 3, 3), 0.5, seed=0)
        with pytest.raises(ContractError):
            apply_mask(img, plan, ConstantFill(0.0))

    def test_fill_value_validated(self):
        with pytest.raises(InputDomainError):
            ConstantFill(1.5)

import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

import softglcm.recon
from softglcm import (
    ConstantInit,
    InputDomainError,
    LossWeights,
    NoiseInit,
    NumericalFailureError,
    PhaseSchedule,
    ReconConfig,
    SoftBinningConfig,
    VisibleMeanInit,
    blur_probe,
    reconstruct_patches,
    texture_distance,
)

MSE_ONLY = PhaseSchedule(warmup_steps=10**9)


def seeded_texture(seed, side=8, amp=0.4):
    rng = np.random.default_rng(seed)
    f = gaussian_filter(rng.normal(0, 1, (side, side)), 1.0, mode="wrap")
    return np.clip(f / f.std() * amp, -0.9, 0.9)


class TestReconstruct:
    def test_exact_init_is_a_fixed_point(self):
        target = np.full((4, 4), 0.25)
        cfg = ReconConfig(max_steps=50, schedule=MSE_ONLY, init=ConstantInit(0.25))
        finals, trace = reconstruct_patches([target], cfg)
        assert len(trace.records) == 1
        assert trace.records[0].total == 0.0
        assert np.array_equal(finals[0], target)

    def test_constant_target_converges_under_mse(self):
        """Descent on a convex quadratic reaches the constant target."""
        cfg = ReconConfig(
            step_size=0.05, max_steps=2000, schedule=MSE_ONLY, init=NoiseInit(5)
        )
        finals, trace = reconstruct_patches([np.full((4, 4), 0.25)], cfg)
        assert trace.records[-1].mse < 1e-6
        assert np.allclose(finals[0], 0.25, atol=1e-3)

    def test_mse_only_descent_is_monotone(self):
        cfg = ReconConfig(step_size=0.05, max_steps=300, schedule=MSE_ONLY, init=NoiseInit(1))
        _, trace = reconstruct_patches([seeded_texture(0)], cfg)
        totals = [r.total for r in trace.records]
        assert all(b <= a for a, b in zip(totals, totals[1:]))

    def test_full_loss_running_minimum_drops_tenfold(self):
        cfg = ReconConfig(
            step_size=0.05,
            max_steps=2000,
            schedule=PhaseSchedule(0),
            binning=SoftBinningConfig(16, 20.0),
            init=NoiseInit(3),
        )
        _, trace = reconstruct_patches([seeded_texture(21)], cfg)
        totals = [r.total for r in trace.records]
        assert totals[0] / min(totals) >= 10.0

    def test_result_stays_clamped(self):
        target = np.full((4, 4), 1.0)
        cfg = ReconConfig(step_size=50.0, max_steps=40, schedule=MSE_ONLY, init=ConstantInit(-1.0))
        finals, _ = reconstruct_patches([target], cfg)
        assert np.all(finals[0] >= -1.0) and np.all(finals[0] <= 1.0)

    def test_trace_steps_strictly_increase(self):
        cfg = ReconConfig(max_steps=25, schedule=MSE_ONLY, init=NoiseInit(2))
        _, trace = reconstruct_patches([seeded_texture(4)], cfg)
        steps = [r.step for r in trace.records]
        assert steps == sorted(set(steps))
        assert len(steps) <= 25

    def test_visible_mean_init_requires_mean(self):
        cfg = ReconConfig(max_steps=5, init=VisibleMeanInit())
        with pytest.raises(InputDomainError, match="visible mean"):
            reconstruct_patches([seeded_texture(5)], cfg)
        finals, _ = reconstruct_patches(
            [np.full((4, 4), 0.5)],
            ReconConfig(max_steps=1, schedule=MSE_ONLY, init=VisibleMeanInit()),
            visible_mean=0.5,
        )
        assert np.allclose(finals[0], 0.5)

    def test_thread_counts_agree_bitwise(self):
        targets = [seeded_texture(s, side=16) for s in range(3)]
        cfg = ReconConfig(
            max_steps=20,
            schedule=PhaseSchedule(8),
            binning=SoftBinningConfig(16, 30.0),
            init=ConstantInit(0.0),
        )
        f1, t1 = reconstruct_patches(targets, cfg, threads=1)
        f4, t4 = reconstruct_patches(targets, cfg, threads=4)
        assert all(np.array_equal(a, b) for a, b in zip(f1, f4))
        assert [r.total for r in t1.records] == [r.total for r in t4.records]

    def test_non_finite_loss_raises_with_step_context(self, monkeypatch):
        calls = {"n": 0}
        real = softglcm.recon.combined_loss

        def poisoned(*args, **kwargs):
            total, comps, grads = real(*args, **kwargs)
            calls["n"] += 1
            if calls["n"] > 3:
                return float("nan"), comps, grads
            return total, comps, grads

        monkeypatch.setattr(softglcm.recon, "combined_loss", poisoned)
        cfg = ReconConfig(max_steps=50, schedule=MSE_ONLY, init=NoiseInit(0))
        with pytest.raises(NumericalFailureError) as err:
            reconstruct_patches([seeded_texture(6)], cfg)
        assert err.value.step == 3
        assert err.value.components is not None

    def test_config_validation(self):
        with pytest.raises(InputDomainError):
            ReconConfig(step_size=0.0)
        with pytest.raises(InputDomainError):
            ReconConfig(max_steps=0)
        with pytest.raises(InputDomainError):
            ReconConfig(offsets=())


class TestTextureDistance:
    def test_identical_patches_zero_distance(self):
        t = seeded_texture(7)
        d = texture_distance([t], [t.copy()], levels=16)
        assert all(v == 0.0 for v in d.values())

    def test_distance_shrinks_as_patches_approach(self):
        t = seeded_texture(8, side=16)
        far = texture_distance([np.clip(0.2 * t, -1, 1)], [t], levels=16)
        near = texture_distance([np.clip(0.9 * t, -1, 1)], [t], levels=16)
        assert near["contrast"] < far["contrast"]


class TestBlurProbe:
    def test_small_sigma_all_components_vanish(self):
        comps = blur_probe(seeded_texture(9, side=16), sigma=1e-4)
        assert all(abs(v) < 1e-8 for v in comps.values())

    def test_constant_patch_is_blur_fixed_point(self):
        comps = blur_probe(np.full((16, 16), 0.4), sigma=2.0)
        assert all(abs(v) < 1e-12 for v in comps.values())

    def test_blur_hurts_texture_term_more_than_pixel_term(self):
        """Relative to a noise-patch baseline, blur moves the co-occurrence
        loss much further than the pixel loss (the motivating asymmetry)."""
        t = seeded_texture(10, side=16)
        blur = blur_probe(t, sigma=1.0)
        noise = np.random.default_rng(0).uniform(-0.9, 0.9, (16, 16))
        from softglcm import combined_loss

        _, baseline, _ = combined_loss([noise], [t], LossWeights(1.0, 1.0, 1.0))
        assert blur["glcm"] / baseline["glcm"] > blur["mse"] / baseline["mse"]

    def test_sigma_validated(self):
        with pytest.raises(InputDomainError):
            blur_probe(np.zeros((8, 8)), sigma=0.0)

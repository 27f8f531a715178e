import numpy as np
import pytest

from conftest import naive_glcm
from softglcm import (
    Direction,
    GeometryError,
    HORIZONTAL,
    InputDomainError,
    OffsetSpec,
    VERTICAL,
    exact_glcm,
    normalize_glcm,
    offset_pairs,
    quantize,
    symmetrize_glcm,
)


class TestQuantize:
    def test_interval_endpoints(self):
        # [-1, 1] splits into K equal bins; the closed top endpoint joins bin K-1.
        q = quantize(np.array([-1.0, 1.0]), 16)
        assert q[0] == 0 and q[1] == 15

    def test_bin_boundaries_belong_to_upper_bin(self):
        assert quantize(np.array([0.0]), 2)[0] == 1
        assert quantize(np.array([-0.5]), 4)[0] == 1

    def test_matches_raw_levels_through_normalization(self):
        # Raw 8-bit levels quantized at K=256 recover themselves.
        raw = np.arange(256)
        t = 2.0 * raw / 255.0 - 1.0
        assert np.array_equal(quantize(t, 256), raw)

    def test_rejects_single_level(self):
        with pytest.raises(InputDomainError):
            quantize(np.zeros(3), 1)


class TestOffsetPairs:
    def test_horizontal_enumeration(self):
        patch = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]) / 10.0
        ref, nbr = offset_pairs(patch, HORIZONTAL)
        assert np.array_equal(ref, np.array([1, 2, 4, 5]) / 10.0)
        assert np.array_equal(nbr, np.array([2, 3, 5, 6]) / 10.0)

    def test_diag135_enumeration(self):
        patch = np.arange(9).reshape(3, 3) / 10.0
        ref, nbr = offset_pairs(patch, OffsetSpec(1, Direction.DIAG_135))
        # Reference pixels must have a partner one row down, one column left.
        assert np.array_equal(ref, np.array([1, 2, 4, 5]) / 10.0)
        assert np.array_equal(nbr, np.array([3, 4, 6, 7]) / 10.0)

    def test_empty_geometry_raises(self):
        with pytest.raises(GeometryError):
            offset_pairs(np.zeros((2, 3)), OffsetSpec(3, Direction.HORIZONTAL_0))


class TestExactGlcm:
    def test_hand_counted_two_level_example(self):
        patch = np.array([[-0.5, 0.5], [0.5, -0.5]])
        m = exact_glcm(patch, 2, HORIZONTAL, normalized=False)
        assert m.pair_count == 2
        assert np.array_equal(m.table, np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            side = int(rng.integers(2, 9))
            patch = rng.uniform(-1, 1, (side, side))
            levels = int(rng.choice([2, 4, 8, 16]))
            direction = rng.choice([Direction.HORIZONTAL_0, Direction.VERTICAL_90])
            distance = int(rng.integers(1, max(2, side - 1)))
            off = OffsetSpec(distance, direction)
            ours = exact_glcm(patch, levels, off, normalized=False)
            assert np.array_equal(ours.table, naive_glcm(patch, levels, off))

    def test_pair_count_conservation(self):
        rng = np.random.default_rng(8)
        patch = rng.uniform(-1, 1, (12, 9))
        for off, expect in ((HORIZONTAL, 12 * 8), (VERTICAL, 11 * 9)):
            m = exact_glcm(patch, 8, off, normalized=False)
            assert m.table.sum() == expect == m.pair_count

    def test_constant_image_degeneracy(self):
        m = exact_glcm(np.full((6, 6), 0.25), 16, HORIZONTAL, normalized=False)
        nz = np.nonzero(m.table)
        assert len(nz[0]) == 1
        assert m.table[nz][0] == m.pair_count

    def test_normalized_sums_to_one(self):
        rng = np.random.default_rng(9)
        m = exact_glcm(rng.uniform(-1, 1, (8, 8)), 4, VERTICAL)
        assert m.normalized
        assert np.isclose(m.table.sum(), 1.0)

    def test_normalize_glcm_idempotent(self):
        m = exact_glcm(np.full((3, 3), 0.0), 4, HORIZONTAL, normalized=False)
        n1 = normalize_glcm(m)
        assert np.isclose(n1.table.sum(), 1.0)
        assert normalize_glcm(n1) is n1

    def test_symmetrize(self):
        patch = np.array([[-0.9, 0.9, 0.9]])
        m = exact_glcm(patch, 2, HORIZONTAL, normalized=False)
        assert not np.array_equal(m.table, m.table.T)
        s = symmetrize_glcm(m)
        assert np.array_equal(s.table, s.table.T)
        assert s.table.sum() == m.table.sum()

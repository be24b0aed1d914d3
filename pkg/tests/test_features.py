import numpy as np
import pytest

from imgprov.features import (
    build_stack,
    frequency_feature,
    frequency_feature_raw,
    pool_features,
    reconstruction_error,
    reconstruction_error_raw,
    reconstruction_l1_score,
    stack_channels,
)
from imgprov.imaging import to_grayscale
from oracles import centered_log_spectrum_definition


def _rand_img(seed, side):
    rng = np.random.default_rng(seed)
    return rng.random((side, side, 3)).astype(np.float32)


class TestFrequencyFeature:
    def test_constant_image_single_dc_spike(self):
        c = 0.5
        img = np.full((512, 512, 3), c, dtype=np.float32)
        raw = frequency_feature_raw(img)
        gray_c = float(to_grayscale(img)[0, 0])
        expected_dc = np.log1p(512 * 512 * gray_c)
        assert raw[256, 256] == pytest.approx(expected_dc, rel=1e-6)
        off = raw.copy()
        off[256, 256] = 0.0
        assert np.max(np.abs(off)) <= 1e-6
        norm = frequency_feature(img)
        assert norm[256, 256] == pytest.approx(1.0)
        norm[256, 256] = 0.0
        assert np.max(norm) <= 1e-6

    def test_all_zero_image_gives_zero_channel(self):
        img = np.zeros((512, 512, 3), dtype=np.float32)
        assert np.array_equal(frequency_feature(img), np.zeros((512, 512), np.float32))

    def test_matches_naive_dft_oracle_16(self):
        img = _rand_img(7, 16)
        raw = frequency_feature_raw(img)
        ref = centered_log_spectrum_definition(to_grayscale(img).astype(np.float64))
        assert np.max(np.abs(raw - ref)) <= 1e-6

    def test_constant_shift_changes_only_dc(self):
        img = _rand_img(8, 16)
        shifted = np.clip(img + 0.125, 0.0, 1.0)
        # keep strictly inside [0,1] so the +c is exact per pixel
        img = img * 0.5
        shifted = img + 0.125
        a = frequency_feature_raw(img)
        b = frequency_feature_raw(shifted)
        a[8, 8] = b[8, 8] = 0.0
        assert np.max(np.abs(a - b)) <= 1e-6

    def test_point_reflection_symmetry_of_real_input(self):
        img = _rand_img(9, 32)
        raw = frequency_feature_raw(img)
        mag = np.expm1(raw)  # back to |G|
        core = mag[1:, 1:]
        assert np.max(np.abs(core - core[::-1, ::-1])) <= 1e-6


class TestReconstructionError:
    def test_identical_pair_is_zero(self):
        img = _rand_img(10, 64)
        assert np.array_equal(
            reconstruction_error(img, img), np.zeros((64, 64), np.float32)
        )

    def test_constant_difference_degenerates_to_zero(self):
        orig = np.ones((8, 8, 3), dtype=np.float32)
        recon = np.zeros((8, 8, 3), dtype=np.float32)
        raw = reconstruction_error_raw(orig, recon)
        assert np.allclose(raw, 1.0)
        assert np.array_equal(
            reconstruction_error(orig, recon), np.zeros((8, 8), np.float32)
        )

    def test_single_hot_pixel_becomes_indicator(self):
        orig = np.zeros((8, 8, 3), dtype=np.float32)
        orig[3, 4, :] = 1.0
        recon = np.zeros((8, 8, 3), dtype=np.float32)
        e = reconstruction_error(orig, recon)
        expected = np.zeros((8, 8), dtype=np.float32)
        expected[3, 4] = 1.0
        assert np.array_equal(e, expected)

    def test_symmetric_in_arguments(self):
        a = _rand_img(11, 16)
        b = _rand_img(12, 16)
        assert np.array_equal(reconstruction_error(a, b), reconstruction_error(b, a))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            reconstruction_error(_rand_img(13, 8), _rand_img(13, 16))

    def test_l1_score_is_mean_of_raw(self):
        a = _rand_img(14, 16)
        b = _rand_img(15, 16)
        assert reconstruction_l1_score(a, b) == pytest.approx(
            float(reconstruction_error_raw(a, b).mean())
        )


class TestStackChannels:
    def test_channel_readback(self):
        img = _rand_img(16, 32)
        e = np.random.default_rng(17).random((32, 32)).astype(np.float32)
        f = np.random.default_rng(18).random((32, 32)).astype(np.float32)
        stack = stack_channels(img, e, f)
        assert stack.shape == (32, 32, 5)
        assert np.array_equal(stack[..., 3], e)
        assert np.array_equal(stack[..., :3], img)
        assert np.array_equal(stack[..., 4], f)

    def test_zero_extra_channels(self):
        img = _rand_img(19, 16)
        z = np.zeros((16, 16), dtype=np.float32)
        stack = stack_channels(img, z, z)
        assert np.array_equal(stack[..., 3:], np.zeros((16, 16, 2), np.float32))

    def test_shape_mismatch_rejected(self):
        img = _rand_img(20, 16)
        with pytest.raises(ValueError):
            stack_channels(img, np.zeros((8, 8), np.float32), np.zeros((16, 16), np.float32))

    def test_build_stack_without_recon_zeroes_e(self):
        img = _rand_img(21, 16)
        stack = build_stack(img)
        assert np.array_equal(stack[..., 3], np.zeros((16, 16), np.float32))


class TestPoolFeatures:
    def test_constant_stack_pools_to_constant(self):
        stack = np.full((512, 512, 5), 0.7, dtype=np.float32)
        pooled = pool_features(stack, 32)
        assert pooled.shape == (32 * 32 * 5,)
        assert np.allclose(pooled, 0.7)

    def test_identity_pooling_is_flatten(self):
        stack = np.random.default_rng(22).random((8, 8, 5)).astype(np.float32)
        pooled = pool_features(stack, 8)
        assert np.array_equal(pooled, stack.reshape(-1))

    def test_two_by_two_block_mean(self):
        stack = np.zeros((2, 2, 1), dtype=np.float32)
        stack[1, :, 0] = 1.0
        pooled = pool_features(stack, 1)
        assert pooled.tolist() == [0.5]

    def test_non_divisor_rejected(self):
        with pytest.raises(ValueError):
            pool_features(np.zeros((512, 512, 5), np.float32), 100)

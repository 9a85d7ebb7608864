import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coughdet.exceptions import ConfigError, InputError, LoadError
from coughdet.features import (
    AccelFeatureConfig,
    AccelFeatures,
    AudioFeatureConfig,
    AudioFeatures,
    FeatureMatrix,
    crest_factor,
    deltas,
    extract_accel_features,
    extract_audio_features,
    frame_positions,
    frame_skip,
    frames,
    kurtosis,
    mel_filterbank,
    mfcc_frame,
    moving_average,
    power_spectrum,
    read_matrix,
    rms,
    write_matrix,
    zcr,
)
from coughdet.features.matrix import from_bytes, to_bytes

from .oracles import delta_formula, naive_power_spectrum, textbook_mfcc


class TestFraming:
    def test_worked_example(self):
        # 1.2 s of audio split into 100 frames
        assert frame_skip(round(1.2 * 22050), 100) == 265

    def test_positions_inside_event(self):
        pos = frame_positions(190, 32, 10)
        assert pos.tolist() == [0, 19, 38, 57, 76, 95, 114, 133, 152, 158]

    def test_event_shorter_than_frame(self):
        with pytest.raises(InputError):
            frames(np.zeros(10), 16, 5)

    def test_too_few_frames(self):
        with pytest.raises(ConfigError):
            frame_positions(100, 16, 1)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(16, 5000), st.sampled_from([16, 32, 64]), st.integers(2, 150))
    def test_frames_fit(self, n, flen, count):
        if n < flen:
            return
        pos = frame_positions(n, flen, count)
        assert len(pos) == count
        assert np.all(pos >= 0) and np.all(pos + flen <= n)
        assert np.all(np.diff(pos) >= 0)


class TestStats:
    def test_rms_mean(self):
        x = np.array([3.0, -4.0])
        assert rms(x) == pytest.approx(np.sqrt(12.5))
        assert moving_average(x) == -0.5

    def test_kurtosis_oracle(self, rng):
        x = rng.normal(size=200)
        m = x.mean()
        m2 = sum((v - m) ** 2 for v in x) / len(x)
        m4 = sum((v - m) ** 4 for v in x) / len(x)
        assert kurtosis(x) == pytest.approx(m4 / m2 ** 2, rel=1e-12)

    def test_degenerate(self):
        assert kurtosis(np.full(8, 2.0)) == 0.0
        assert crest_factor(np.zeros(8)) == 0.0
        assert crest_factor(np.full(8, -2.0)) == 1.0
        assert zcr(np.array([1.0, -1.0, 1.0, -1.0])) == 1.0
        assert zcr(np.array([1.0, 0.0, 2.0])) == 0.0


class TestAccel:
    def test_power_spectrum_naive_dft(self, rng):
        for n in (16, 32, 64):
            x = rng.normal(size=n)
            oracle = naive_power_spectrum(x)
            np.testing.assert_allclose(power_spectrum(x), oracle, rtol=1e-9, atol=1e-9 * oracle.max())

    def test_parseval(self, rng):
        x = rng.normal(size=32)
        p = power_spectrum(x)
        full = p[0] + 2 * p[1:-1].sum() + p[-1]
        assert full / 32 == pytest.approx(np.sum(x * x), rel=1e-12)

    def test_non_power_of_two(self):
        with pytest.raises(InputError):
            power_spectrum(np.zeros(24))
        with pytest.raises(ConfigError):
            AccelFeatureConfig(frame_len=24)

    @pytest.mark.parametrize("flen", [16, 32, 64])
    @pytest.mark.parametrize("segs", [5, 10])
    def test_shape(self, flen, segs, rng):
        m = extract_accel_features(np.abs(rng.normal(size=190)), AccelFeatureConfig(flen, segs))
        assert m.shape == (segs, flen // 2 + 5)

    def test_columns(self, rng):
        x = np.abs(rng.normal(size=190))
        m = extract_accel_features(x, AccelFeatureConfig(16, 5)).data
        fr = frames(x, 16, 5)
        np.testing.assert_allclose(m[:, :9], np.abs(np.fft.fft(fr, axis=1)[:, :9]) ** 2, rtol=1e-12)
        np.testing.assert_allclose(m[:, 9], np.sqrt((fr ** 2).mean(axis=1)))
        np.testing.assert_allclose(m[:, 11], fr.mean(axis=1))
        np.testing.assert_allclose(m[:, 12], np.abs(fr).max(axis=1) / np.sqrt((fr ** 2).mean(axis=1)))


class TestAudio:
    @pytest.mark.parametrize("n_mfcc,flen", [(13, 256), (26, 512), (13, 1024), (65, 2048)])
    def test_mfcc_textbook(self, n_mfcc, flen, rng):
        cfg = AudioFeatureConfig(n_mfcc=n_mfcc, frame_len=flen, n_segments=50)
        frame = rng.uniform(-0.5, 0.5, size=flen)
        ref = textbook_mfcc(frame, n_mfcc, cfg.n_mels, cfg.n_fft)
        np.testing.assert_allclose(mfcc_frame(frame, cfg), ref, atol=1e-6)

    def test_mfcc_gain_moves_c0_only(self, rng):
        cfg = AudioFeatureConfig(n_mfcc=13, frame_len=512, n_segments=50)
        frame = rng.normal(size=512) * 0.1
        a, b = mfcc_frame(frame, cfg), mfcc_frame(3.0 * frame, cfg)
        assert b[0] - a[0] == pytest.approx(2 * np.log(3.0) * np.sqrt(cfg.n_mels), rel=1e-9)
        np.testing.assert_allclose(b[1:], a[1:], atol=1e-9)

    def test_filterbank(self):
        fb = mel_filterbank(40, 512)
        assert fb.shape == (40, 257)
        assert np.all(fb >= 0) and np.all(fb.max(axis=1) <= 1)
        with pytest.raises(ConfigError):
            mel_filterbank(65, 256)

    def test_deltas_exact(self, rng):
        seq = rng.normal(size=(30, 13))
        d = deltas(seq)
        assert np.array_equal(d, delta_formula(seq))
        assert np.array_equal(deltas(d), delta_formula(delta_formula(seq)))

    def test_deltas_linear_ramp(self):
        seq = np.arange(10.0)[:, None] * np.array([1.0, -2.0])
        np.testing.assert_allclose(deltas(seq)[2:-2], np.tile([1.0, -2.0], (6, 1)))

    @pytest.mark.parametrize("n_mfcc", [13, 26, 39, 52, 65])
    @pytest.mark.parametrize("flen", [256, 512, 1024, 2048, 4096])
    def test_shape(self, n_mfcc, flen, rng):
        x = rng.uniform(-0.5, 0.5, size=round(1.9 * 22050))
        for segs in (50, 70, 100, 120, 150):
            cfg = AudioFeatureConfig(n_mfcc=n_mfcc, frame_len=flen, n_segments=segs)
            assert extract_audio_features(x, cfg).shape == (segs, 3 * n_mfcc + 2)

    def test_columns(self, rng):
        x = rng.uniform(-0.5, 0.5, size=22050)
        cfg = AudioFeatureConfig(n_mfcc=13, frame_len=512, n_segments=50)
        m = extract_audio_features(x, cfg).data
        fr = frames(x, 512, 50)
        np.testing.assert_allclose(m[7, :13], mfcc_frame(fr[7], cfg))
        np.testing.assert_allclose(m[:, 13:26], deltas(m[:, :13]))
        np.testing.assert_allclose(m[:, 26:39], deltas(deltas(m[:, :13])))
        np.testing.assert_allclose(m[:, 39], zcr(fr))
        np.testing.assert_allclose(m[:, 40], kurtosis(fr))


class TestMatrixIO:
    def test_round_trip(self, tmp_path, rng):
        data = rng.normal(size=(7, 11))
        write_matrix(tmp_path / "m.bin", data)
        assert np.array_equal(read_matrix(tmp_path / "m.bin").data, data)

    def test_layout(self):
        raw = to_bytes(np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]))
        assert raw[:8] == (3).to_bytes(4, "little") + (2).to_bytes(4, "little")
        assert np.frombuffer(raw[8:], "<f8").tolist() == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]

    def test_truncated(self):
        raw = to_bytes(np.ones((2, 2)))
        with pytest.raises(LoadError):
            from_bytes(raw[:-3])

    def test_not_2d(self):
        with pytest.raises((InputError, ValueError)):
            FeatureMatrix(np.ones(3), "accel")


class TestTransformers:
    def test_accel_transformer(self, rng):
        xs = [np.abs(rng.normal(size=n)) for n in (150, 190, 240)]
        t = AccelFeatures(frame_len=16, n_segments=5).fit()
        out = t.transform(xs)
        assert out.shape == (3, 5 * 13)
        np.testing.assert_array_equal(out[1], extract_accel_features(xs[1], AccelFeatureConfig(16, 5)).flatten())
        assert len(t.get_feature_names_out()) == 65
        assert t.get_params() == {"frame_len": 16, "n_segments": 5}

    def test_audio_transformer(self, rng):
        xs = [rng.uniform(-0.5, 0.5, size=30000)]
        out = AudioFeatures(n_mfcc=13, frame_len=512, n_segments=50).fit().transform(xs)
        assert out.shape == (1, 50 * 41)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cepvad.dsp import (
    AudioSignal,
    Frame,
    Label,
    MelCepstrum,
    band_energies,
    extract_frames,
    frame_count,
    hz_to_mel,
    make_filterbank,
    mel_cepstrum,
    slice_frames,
)
from cepvad.exceptions import ConfigurationError, DataError, EmptyInputError
from cepvad.noise import white_noise


class TestExtractFrames:
    def test_two_frames(self):
        sig = AudioSignal(np.arange(2048.0), 8000)
        assert len(extract_frames(sig, 1024, 1024)) == 2

    def test_no_preemphasis_is_windowed_slice(self):
        x = white_noise(3000, 5)
        frames = extract_frames(AudioSignal(x, 8000), 1024, 512, preemph=0.0)
        for i, f in enumerate(frames):
            np.testing.assert_array_equal(f.samples, x[i * 512:i * 512 + 1024] * np.hamming(1024))

    def test_constant_signal_hand_values(self):
        frame = extract_frames(AudioSignal(np.ones(1024), 8000), 1024, preemph=0.97)[0]
        # y = [1, 0.03, 0.03, ...]; Hamming w[0] = 0.08, w[1] = 0.54 - 0.46 cos(2 pi / 1023)
        assert frame.samples[0] == pytest.approx(0.08, abs=1e-15)
        assert frame.samples[1] == pytest.approx(0.0024002602892276787, rel=1e-12)
        w = 0.54 - 0.46 * math.cos(2 * math.pi * 500 / 1023)
        assert frame.samples[500] == pytest.approx(0.03 * w, rel=1e-12)

    def test_metadata_copied(self):
        sig = AudioSignal(np.ones(2048), 8000, Label.SPEECH, 10.0, "a.wav")
        f = extract_frames(sig, 1024)[1]
        assert (f.index, f.label, f.snr_db, f.source, f.windowed) == (1, Label.SPEECH, 10.0, "a.wav", True)
        raw = slice_frames(sig, 1024)[0]
        assert not raw.windowed
        np.testing.assert_array_equal(raw.samples, np.ones(1024))

    def test_too_short(self):
        with pytest.raises(EmptyInputError):
            extract_frames(AudioSignal(np.ones(100), 8000), 1024)

    def test_non_finite(self):
        with pytest.raises(DataError):
            AudioSignal(np.array([0.0, np.nan, 1.0]), 8000)

    @pytest.mark.parametrize("n", range(2, 40, 3))
    def test_count_matches_closed_form(self, n):
        for frame_len in range(2, 12):
            for hop in range(1, 8):
                if n < frame_len:
                    continue
                got = len(extract_frames(AudioSignal(np.ones(n), 8000), frame_len, hop))
                assert got == (n - frame_len) // hop + 1 == frame_count(n, frame_len, hop)


class TestFilterBank:
    def test_default_bank(self):
        fb = make_filterbank(8000, 1024, 16, 100, 3500)
        assert fb.num_filters == 16
        freqs = fb.bin_frequencies
        for row in fb.weights:
            pos = freqs[row > 0]
            assert pos.min() >= 100 and pos.max() <= 3500
        assert np.all(np.diff(fb.centers) > 0)
        assert np.all(fb.weights >= 0)
        assert np.all(fb.weights.max(axis=1) > 0)

    def test_centers_equally_spaced_on_mel(self):
        fb = make_filterbank()
        d = np.diff(hz_to_mel(fb.centers))
        np.testing.assert_allclose(d, d[0], rtol=1e-9)

    def test_two_filters_share_one_overlap(self):
        fb = make_filterbank(8000, 1024, 2, 100, 3500)
        both = (fb.weights[0] > 0) & (fb.weights[1] > 0)
        idx = np.flatnonzero(both)
        assert idx.size > 0
        assert np.all(np.diff(idx) == 1)  # one contiguous region

    def test_gain_sum_bounded_over_all_bins(self):
        fb = make_filterbank()
        total = fb.weights.sum(axis=0)
        freqs = fb.bin_frequencies
        inner = (freqs > fb.centers[0]) & (freqs < fb.centers[-1])
        assert np.all(total[inner] > 0) and np.all(total[inner] <= 2)
        # raised-cosine lobes at 50% overlap tile the interior exactly
        np.testing.assert_allclose(total[inner], 1.0, atol=1e-12)

    @pytest.mark.parametrize("lo,hi", [(0, 3500), (3500, 100), (100, 4001), (-5, 200)])
    def test_bad_range(self, lo, hi):
        with pytest.raises(ConfigurationError):
            make_filterbank(8000, 1024, 16, lo, hi)

    def test_immutable(self):
        fb = make_filterbank()
        with pytest.raises(ValueError):
            fb.weights[0, 0] = 1.0


class TestBandEnergies:
    def test_zero_frame_hits_floor(self):
        fb = make_filterbank()
        np.testing.assert_array_equal(band_energies(np.zeros(1024), fb), np.full(16, 1e-10))

    @pytest.mark.parametrize("k", range(16))
    def test_sinusoid_at_center_peaks_in_its_band(self, k):
        fb = make_filterbank()
        t = np.arange(1024) / 8000
        frame = Frame(np.hamming(1024) * np.sin(2 * np.pi * fb.centers[k] * t), 0)
        assert int(np.argmax(band_energies(frame, fb))) == k

    def test_white_noise_reference_and_determinism(self):
        fb = make_filterbank()
        x = np.hamming(1024) * white_noise(1024, 42)
        a, b = band_energies(x, fb), band_energies(x, fb)
        np.testing.assert_array_equal(a, b)
        ref = [2867.9472601, 4426.41168949, 5727.6722318, 6270.93757379]
        np.testing.assert_allclose(a[:4], ref, atol=1.0)

    def test_frame_longer_than_fft(self):
        with pytest.raises(ConfigurationError):
            band_energies(np.ones(2048), make_filterbank(fft_size=1024))


class TestMelCepstrum:
    def test_unit_energies(self):
        np.testing.assert_array_equal(mel_cepstrum(np.ones(16), 8), np.zeros(9))

    def test_constant_e(self):
        c = mel_cepstrum(np.full(16, np.e), 8)
        assert c[0] == pytest.approx(16.0, abs=1e-12)
        np.testing.assert_allclose(c[1:], 0.0, atol=1e-12)

    def test_single_cosine_direct_sum(self):
        N = 16
        logS = [math.cos((k - 0.5) * math.pi / N) for k in range(1, N + 1)]
        oracle = [sum(logS[k - 1] * math.cos(p * (k - 0.5) * math.pi / N) for k in range(1, N + 1))
                  for p in range(9)]
        c = mel_cepstrum(np.exp(logS), 8)
        np.testing.assert_allclose(c, oracle, atol=1e-12)
        assert c[1] == pytest.approx(8.0, abs=1e-12)
        np.testing.assert_allclose(c[2:], 0.0, atol=1e-12)

    def test_d_larger_than_n(self):
        with pytest.raises(ConfigurationError):
            mel_cepstrum(np.ones(4), 8)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(-20, 20), min_size=16, max_size=16),
           st.floats(1e-3, 1e3))
    def test_gain_moves_only_c0(self, logS, a):
        S = np.exp(np.array(logS))
        c, ca = mel_cepstrum(S, 8), mel_cepstrum(S * a, 8)
        assert ca[0] - c[0] == pytest.approx(16 * math.log(a), abs=1e-9)
        np.testing.assert_allclose(ca[1:], c[1:], atol=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-30, 30))
    def test_constant_log_energy_is_orthogonal(self, level):
        c = mel_cepstrum(np.full(16, math.exp(level)), 8)
        np.testing.assert_allclose(c[1:], 0.0, atol=1e-9)


class TestMelCepstrumTransformer:
    def test_deterministic(self, cepstrum):
        X = np.vstack([white_noise(1024, s) for s in range(5)])
        np.testing.assert_array_equal(cepstrum.transform(X), cepstrum.transform(X))

    def test_matches_functional_path(self, cepstrum):
        x = white_noise(2048, 3)
        frames = extract_frames(AudioSignal(x, 8000), 1024)
        fb = make_filterbank()
        expected = np.vstack([mel_cepstrum(band_energies(f, fb), 8) for f in frames])
        np.testing.assert_allclose(cepstrum.transform(x.reshape(2, 1024)), expected, rtol=1e-12, atol=1e-12)

    def test_get_params_roundtrip(self):
        est = MelCepstrum(n_coeffs=6, preemph=0.9)
        assert est.get_params()["n_coeffs"] == 6
        assert MelCepstrum(**est.get_params()).get_params() == est.get_params()

    def test_output_shape(self, cepstrum):
        assert cepstrum.transform(np.ones((3, 1024))).shape == (3, 9)

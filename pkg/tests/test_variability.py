import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cepvad.exceptions import ConfigurationError, EmptyInputError
from cepvad.noise import white_noise
from cepvad.variability import (
    NoiseCepstralMeans,
    VariabilityScore,
    noise_cepstral_means,
    score_v1,
    score_v2,
    score_v2n,
)

W_V1 = [-.4, .2, .3, .3, -.2, 1., .3, -.1]
W_V2N = [.7, .8, .8, 1., .4, .6, .8, .1]

finite = st.floats(-50, 50, allow_nan=False)
vec9 = arrays(np.float64, 9, elements=finite)
vec8 = arrays(np.float64, 8, elements=finite)


def cep(*coeffs):
    return np.array([0.0, *coeffs])


class TestV1:
    def test_zero_weights(self):
        assert score_v1(cep(*range(1, 9)), np.zeros(8)) == 0

    def test_reported_weights_on_ones(self):
        assert score_v1(np.ones(9), W_V1) == pytest.approx(1.4, abs=1e-12)

    def test_single_term(self):
        assert score_v1(cep(2, 0, 0, 0, 0, 0, 0, 0), np.ones(8)) == 2

    def test_ignores_c0_and_sign_of_c(self):
        assert score_v1(np.array([99.0, -1, -1, -1, -1, -1, -1, -1, -1]), W_V1) == pytest.approx(1.4)

    def test_can_be_negative(self):
        assert score_v1(cep(5, 0, 0, 0, 0, 0, 0, 0), W_V1) == pytest.approx(-2.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigurationError):
            score_v1(np.ones(9), np.ones(7))


class TestV2:
    def test_zero(self):
        assert score_v2(np.zeros(9), np.arange(8.0)) == 0

    def test_single_term(self):
        w = np.array([5.0, -3, 2, 7, 1, 1, 1, 1])
        assert score_v2(cep(0, 0, 2, 0, 0, 0, 0, 0), w) == 4

    def test_all_ones(self):
        assert score_v2(np.ones(9), np.ones(8)) == pytest.approx(2.8284271247461903, rel=1e-15)

    def test_matrix_input(self):
        C = np.vstack([np.ones(9), np.zeros(9)])
        np.testing.assert_allclose(score_v2(C, np.ones(8)), [np.sqrt(8), 0])


class TestV2N:
    def test_at_means(self):
        c = np.arange(9.0)
        assert score_v2n(c, np.ones(8), NoiseCepstralMeans(c[1:], 10)) == 0

    def test_zero_means_equals_v2(self):
        c = np.arange(9.0) - 3
        assert score_v2n(c, W_V2N, np.zeros(8)) == score_v2(c, W_V2N)

    def test_reported_weights_axis5(self):
        means = np.linspace(-2, 2, 8)
        c = np.concatenate([[0.0], means])
        c[5] += 1.0
        assert score_v2n(c, W_V2N, means) == pytest.approx(0.4, abs=1e-12)

    def test_means_dimension(self):
        with pytest.raises(ConfigurationError):
            score_v2n(np.ones(9), np.ones(8), np.ones(7))


class TestNoiseMeans:
    def test_single_frame(self):
        c = np.arange(9.0)
        m = noise_cepstral_means([c])
        np.testing.assert_array_equal(m.means, c[1:])
        assert m.frames_used == 1

    def test_symmetric_pair(self):
        c = np.arange(9.0) + 1
        np.testing.assert_array_equal(noise_cepstral_means([c, -c]).means, np.zeros(8))

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            noise_cepstral_means(np.empty((0, 9)))

    def test_white_noise_c1_strongly_negative(self, cepstrum):
        X = np.vstack([white_noise(1024, 500, i) for i in range(1000)])
        m = noise_cepstral_means(cepstrum.transform(X))
        assert m.frames_used == 1000
        assert m.means[0] < -10  # white noise piles energy into the wide high bands


class TestProperties:
    @settings(max_examples=200)
    @given(vec9, vec8, st.floats(-10, 10))
    def test_homogeneity(self, c, w, a):
        assert score_v2(c, a * w) == pytest.approx(abs(a) * score_v2(c, w), rel=1e-12, abs=1e-12)
        m = np.linspace(-1, 1, 8)
        assert score_v2n(c, a * w, m) == pytest.approx(abs(a) * score_v2n(c, w, m), rel=1e-12, abs=1e-12)
        assert score_v1(c, a * w) == pytest.approx(a * score_v1(c, w), rel=1e-12, abs=1e-9)

    @settings(max_examples=200)
    @given(vec9, vec8, arrays(np.bool_, 8), arrays(np.bool_, 8))
    def test_v2_sign_flip_invariance(self, c, w, flip_c, flip_w):
        c2 = c.copy()
        c2[1:][flip_c] *= -1
        w2 = np.where(flip_w, -w, w)
        assert score_v2(c2, w2) == score_v2(c, w)

    @settings(max_examples=200)
    @given(vec9, vec8)
    def test_v2n_zero_means_is_v2(self, c, w):
        assert score_v2n(c, w, np.zeros(8)) == score_v2(c, w)

    @settings(max_examples=200)
    @given(vec9, vec9, vec8, vec8)
    def test_v2n_triangle(self, a, b, w, m):
        dist_ab = np.sqrt(np.sum((w * (a[1:] - b[1:])) ** 2))
        assert score_v2n(a, w, m) <= score_v2n(b, w, m) + dist_ab + 1e-9


class TestTransformer:
    def test_v2n_fit_on_noise(self):
        C = np.vstack([np.arange(9.0), np.arange(9.0) + 2])
        est = VariabilityScore(kind="v2n").fit(C)
        np.testing.assert_array_equal(est.means_.means, np.arange(1.0, 9) + 1)
        out = est.transform(C)
        assert out.shape == (2, 1)
        np.testing.assert_allclose(out[:, 0], [np.sqrt(8), np.sqrt(8)])

    def test_bad_kind(self):
        with pytest.raises(ConfigurationError):
            VariabilityScore(kind="v3").fit(np.ones((2, 9)))

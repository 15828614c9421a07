import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arofsim.signal import (BELOW_FLOOR, AliasingError, BandOverflowError, SampledSignal,
                            add_awgn, apply_frequency_response, combine, estimate_psd,
                            frequency_shift, measure_power_dbm, occupied_band, power_mw,
                            resample)

FS = 1.024e9
N = 4096


def tone(f, n=N, fs=FS, amp=1.0):
    t = np.arange(n) / fs
    return SampledSignal(amp * np.exp(2j * np.pi * f * t), fs)


def bandlimited(rng, bw, n=N, fs=FS):
    # white complex noise restricted to |f| < bw/2 in the DFT domain
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    X = np.fft.fft(x)
    X[np.abs(np.fft.fftfreq(n, 1 / fs)) >= bw / 2] = 0
    return SampledSignal(np.fft.ifft(X), fs)


class TestContainer:
    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            SampledSignal(np.array([]), 1.0)
        with pytest.raises(ValueError):
            SampledSignal(np.array([1.0, np.nan]), 1.0)
        with pytest.raises(ValueError):
            SampledSignal(np.ones(4), 0.0)

    def test_samples_are_frozen_copies(self):
        raw = np.ones(8, dtype=complex)
        s = SampledSignal(raw, 1.0)
        raw[0] = 5
        assert s.samples[0] == 1
        with pytest.raises(ValueError):
            s.samples[0] = 2

    def test_two_track_shape(self):
        s = SampledSignal(np.ones((2, 16)), 1.0)
        assert s.n_tracks == 2 and s.n_samples == 16
        assert power_mw(s) == pytest.approx(2.0)


class TestPower:
    def test_unit_amplitude_is_0_dbm(self):
        assert measure_power_dbm(SampledSignal(np.ones(16), 1.0)) == 0.0

    def test_sqrt2_amplitude(self):
        p = measure_power_dbm(SampledSignal(np.full(16, np.sqrt(2)), 1.0))
        assert p == pytest.approx(3.0103, abs=5e-5)

    def test_all_zero_is_below_floor(self):
        assert measure_power_dbm(SampledSignal(np.zeros(16), 1.0)) == BELOW_FLOOR


class TestFrequencyShift:
    def test_zero_shift_identity(self):
        s = tone(10e6)
        assert frequency_shift(s, 0.0) is s

    def test_tone_moves(self):
        s = frequency_shift(tone(0.0), 200e6)
        psd = estimate_psd(s, N, window="boxcar")
        assert psd.frequencies[np.argmax(psd.psd)] == pytest.approx(200e6, abs=psd.resolution)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-300e6, 300e6))
    def test_power_preserved(self, delta):
        s = bandlimited(np.random.default_rng(1), 100e6)
        out = frequency_shift(s, delta)
        assert power_mw(out) == pytest.approx(power_mw(s), rel=1e-12)

    def test_overflow_rejected(self):
        s = bandlimited(np.random.default_rng(2), 200e6)
        with pytest.raises(BandOverflowError):
            frequency_shift(s, 450e6)
        with pytest.raises(BandOverflowError):
            frequency_shift(s, FS)

    def test_linear_with_combine(self):
        rng = np.random.default_rng(3)
        a, b = bandlimited(rng, 100e6), bandlimited(rng, 100e6)
        lhs = combine([frequency_shift(a, 120e6), frequency_shift(b, 120e6)])
        rhs = frequency_shift(combine([a, b]), 120e6)
        err = np.linalg.norm(lhs.samples - rhs.samples) / np.linalg.norm(rhs.samples)
        assert err < 1e-9

    def test_psd_translates(self):
        rng = np.random.default_rng(4)
        s = bandlimited(rng, 100e6)
        p0 = estimate_psd(s, 512)
        p1 = estimate_psd(frequency_shift(s, 128e6), 512)
        shift_bins = int(round(128e6 / p0.resolution))
        np.testing.assert_allclose(np.roll(p0.psd, shift_bins)[100:-100], p1.psd[100:-100],
                                   atol=1e-9)


class TestResample:
    def test_same_rate_identity(self):
        s = tone(10e6)
        assert resample(s, FS) is s

    def test_round_trip(self):
        s = bandlimited(np.random.default_rng(5), 300e6)
        back = resample(resample(s, 2 * FS), FS)
        err = np.sqrt(np.mean(np.abs(back.samples - s.samples) ** 2) / power_mw(s))
        assert err < 1e-6

    def test_tone_stays_put(self):
        f0 = 50 * FS / N
        out = resample(tone(f0), FS / 2)
        psd = estimate_psd(out, out.n_samples, window="boxcar")
        assert abs(psd.frequencies[np.argmax(psd.psd)] - f0) <= psd.resolution

    def test_in_band_spectrum_preserved(self):
        s = bandlimited(np.random.default_rng(6), 200e6)
        up = resample(s, 2 * FS)
        X = np.abs(np.fft.fft(s.samples)) ** 2
        Y = np.abs(np.fft.fft(up.samples)) ** 2 / 4  # twice the length: 4x energy per bin
        band = np.abs(np.fft.fftfreq(N, 1 / FS)) < 90e6
        fy = np.fft.fftfreq(2 * N, 1 / (2 * FS))
        idx = np.rint(np.fft.fftfreq(N, 1 / FS)[band] / (2 * FS / (2 * N))).astype(int) % (2 * N)
        assert np.allclose(fy[idx], np.fft.fftfreq(N, 1 / FS)[band])
        np.testing.assert_allclose(10 * np.log10(Y[idx] / X[band]), 0.0, atol=0.1)

    def test_aliasing_rejected(self):
        s = bandlimited(np.random.default_rng(7), 600e6)
        with pytest.raises(AliasingError):
            resample(s, FS / 2)


class TestCombine:
    def test_single_input(self):
        s = tone(1e6)
        np.testing.assert_array_equal(combine([s]).samples, s.samples)

    def test_cancellation(self):
        s = tone(1e6)
        assert not np.any(combine([s, s.replace(-s.samples)]).samples)

    def test_disjoint_bands_add_powers(self):
        rng = np.random.default_rng(8)
        a = frequency_shift(bandlimited(rng, 100e6), -200e6)
        b = frequency_shift(bandlimited(rng, 100e6), 200e6)
        assert power_mw(combine([a, b])) == pytest.approx(power_mw(a) + power_mw(b), rel=1e-9)

    def test_rate_mismatch(self):
        with pytest.raises(ValueError):
            combine([tone(0, fs=FS), tone(0, fs=2 * FS)])

    def test_zero_pad_and_loss(self):
        a = SampledSignal(np.ones(8), 1.0)
        b = SampledSignal(np.ones(4), 1.0)
        out = combine([a, b], insertion_loss_db=[0.0, 20 * np.log10(2)])
        np.testing.assert_allclose(out.samples.real, [1.5] * 4 + [1.0] * 4)

    def test_single_track_joins_track_zero(self):
        two = SampledSignal(np.ones((2, 4)), 1.0)
        out = combine([two, SampledSignal(np.ones(4), 1.0)])
        np.testing.assert_allclose(out.samples.real, [[2] * 4, [1] * 4])


class TestPsd:
    def test_white_noise_flat_and_integrates(self):
        rng = np.random.default_rng(9)
        p = 0.25
        x = np.sqrt(p / 2) * (rng.standard_normal(1 << 16) + 1j * rng.standard_normal(1 << 16))
        psd = estimate_psd(SampledSignal(x, FS), 1024)
        assert psd.integrate() == pytest.approx(p, rel=0.05)
        assert np.std(psd.psd) < 0.5  # dB ripple of a 64-average estimate
        assert np.all(np.diff(psd.frequencies) > 0)

    def test_tone_peak(self):
        psd = estimate_psd(tone(64 * FS / N), 1024)
        assert psd.psd.max() - np.median(psd.psd) >= 30

    def test_parseval_raw_dft(self):
        rng = np.random.default_rng(10)
        x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        psd = estimate_psd(SampledSignal(x, FS), N, window="boxcar")
        X = np.fft.fft(x)
        assert np.sum(np.abs(X) ** 2) / N == pytest.approx(np.sum(np.abs(x) ** 2), rel=1e-9)
        assert psd.integrate() == pytest.approx(np.mean(np.abs(x) ** 2), rel=1e-9)

    def test_segment_too_long(self):
        with pytest.raises(ValueError):
            estimate_psd(tone(0), N + 1)

    def test_center_offset_applied(self):
        s = SampledSignal(tone(0.0).samples, FS, center_offset=21.91e9)
        psd = estimate_psd(s, N, window="boxcar")
        assert psd.frequencies[np.argmax(psd.psd)] == pytest.approx(21.91e9)


class TestHelpers:
    def test_occupied_band_of_band_limited_noise(self):
        lo, hi = occupied_band(bandlimited(np.random.default_rng(11), 200e6))
        assert -100e6 <= lo < -90e6 and 90e6 < hi <= 100e6

    def test_frequency_response_identity(self):
        s = tone(3e6)
        out = apply_frequency_response(s, lambda f: np.ones_like(f))
        np.testing.assert_allclose(out.samples, s.samples, atol=1e-12)

    def test_inputs_not_modified(self):
        s = bandlimited(np.random.default_rng(12), 100e6)
        before = s.samples.copy()
        frequency_shift(s, 1e6)
        resample(s, 2 * FS)
        combine([s, s])
        apply_frequency_response(s, lambda f: 0.5 * np.ones_like(f))
        np.testing.assert_array_equal(s.samples, before)

    @pytest.mark.parametrize("snr_db", [0.0, 10.0, 20.0])
    def test_awgn_in_band_snr(self, snr_db):
        rng = np.random.default_rng(13)
        s = tone(1e6, n=1 << 16)
        noisy = add_awgn(s, snr_db, FS / 4, rng)
        noise = noisy.samples - s.samples
        N_in_band = np.mean(np.abs(noise) ** 2) * (FS / 4) / FS
        assert 10 * np.log10(1.0 / N_in_band) == pytest.approx(snr_db, abs=0.1)

    def test_awgn_real_signal_gets_real_noise(self):
        rng = np.random.default_rng(14)
        t = np.arange(1 << 16) / FS
        s = SampledSignal(np.sqrt(2) * np.cos(2 * np.pi * 1e6 * t), FS)
        noisy = add_awgn(s, 10.0, FS / 4, rng)
        assert noisy.is_real
        # one-sided bandwidth B holds fraction 2B/fs of a real white noise power
        n_in_band = np.var(noisy.samples.real - s.samples.real) * 2 * (FS / 4) / FS
        assert 10 * np.log10(1.0 / n_in_band) == pytest.approx(10.0, abs=0.1)

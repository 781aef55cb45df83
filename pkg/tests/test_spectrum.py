import numpy as np
import pytest

from beamlaser import (contrast_ratio, find_peaks, fit_linewidth, g1_estimate,
                       psd, pulling_coefficient)
from beamlaser.dynamics import FieldRecord
from beamlaser.spectrum import CorrelationEstimate, Peak, SpectrumResult

TWO_PI = 2 * np.pi


def make_record(j_plus, dt):
    n = j_plus.size
    return FieldRecord(t=np.arange(n) * dt, j_plus=j_plus,
                       n_phot=np.abs(j_plus) ** 2, dt_record=dt)


def tone_record(f0, dt=1e-7, n=4096, amp=1.0):
    t = np.arange(n) * dt
    return make_record(amp * np.exp(2j * np.pi * f0 * t), dt)


def lorentzian_corr(fwhm, f0, dt=1e-7, nlag=4096, amp=1.0):
    lags = np.arange(nlag + 1) * dt
    g1 = amp * np.exp(-np.pi * fwhm * lags) * np.exp(2j * np.pi * f0 * lags)
    return CorrelationEstimate(lags=lags, g1=g1)


class TestG1:
    def test_positive_rotation_gives_positive_frequency_tone(self):
        # J+ ~ exp(+i w t) represents emission above the atomic line; the
        # convention is locked so it lands at +w/2pi.
        f0 = 0.8e6
        rec = tone_record(f0, dt=1e-7, n=8000)
        corr = g1_estimate(rec, max_lag=1e-4)
        want = np.exp(2j * np.pi * f0 * corr.lags)
        assert np.allclose(corr.g1, want, atol=1e-9)
        spec = psd(corr)
        fpk = spec.freq[np.argmax(spec.psd)]
        assert abs(fpk - f0) <= spec.bin_hz

    def test_negative_rotation_gives_negative_frequency(self):
        rec = tone_record(-0.8e6, dt=1e-7, n=8000)
        spec = psd(g1_estimate(rec, max_lag=1e-4))
        fpk = spec.freq[np.argmax(spec.psd)]
        assert abs(fpk + 0.8e6) <= spec.bin_hz

    def test_zero_lag_equals_mean_power(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=500) + 1j * rng.normal(size=500)
        rec = make_record(x, 1e-8)
        corr = g1_estimate(rec, max_lag=1e-6)
        assert corr.g1[0].real == pytest.approx(np.mean(np.abs(x) ** 2), rel=1e-12)
        assert corr.g1[0].imag == pytest.approx(0.0, abs=1e-12)

    def test_white_noise_decorrelates(self):
        rng = np.random.default_rng(1)
        n = 200_000
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        corr = g1_estimate(make_record(x, 1e-8), max_lag=2e-7)
        assert np.all(np.abs(corr.g1[1:]) < 10 * corr.g1[0].real / np.sqrt(n))

    def test_lag_limit_enforced(self):
        rec = tone_record(1e5, n=1000)
        with pytest.raises(ValueError):
            g1_estimate(rec, max_lag=rec.dt_record * 400)


class TestPsd:
    def test_parseval(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=3000) + 1j * rng.normal(size=3000)
        corr = g1_estimate(make_record(x, 1e-8), max_lag=5e-6)
        spec = psd(corr)
        df = spec.bin_hz
        total = np.sum(spec.psd) * df
        assert total == pytest.approx(corr.g1[0].real, rel=1e-6)

    def test_on_bin_tone_is_nonnegative_single_bin(self):
        dt, nlag = 1e-7, 500
        f0 = 10 / ((2 * nlag + 1) * dt)      # exactly on a frequency bin
        corr = CorrelationEstimate(
            lags=np.arange(nlag + 1) * dt,
            g1=np.exp(2j * np.pi * f0 * np.arange(nlag + 1) * dt))
        spec = psd(corr)
        assert spec.psd.min() >= -1e-12 * spec.psd.max()
        assert np.sum(spec.psd > spec.psd.max() / 2) == 1

    def test_lorentzian_transform_pair(self):
        fwhm = 10e3
        spec = psd(lorentzian_corr(fwhm, f0=0.0, dt=1e-7, nlag=40_000))
        peaks = find_peaks(spec, delta_pa_hz=0.0)
        fit = fit_linewidth(spec, peaks.central)
        assert fit.method == "fit"
        assert fit.fwhm == pytest.approx(fwhm, rel=0.05)
        assert abs(fit.offset) < spec.bin_hz

    def test_hann_window_broadens_but_keeps_location(self):
        spec = psd(lorentzian_corr(5e3, f0=2e5, nlag=20_000), window="hann")
        peaks = find_peaks(spec, delta_pa_hz=0.0)
        assert abs(peaks.central.freq - 2e5) < 2 * spec.bin_hz

    def test_unknown_window_rejected(self):
        with pytest.raises(ValueError):
            psd(lorentzian_corr(1e3, 0.0), window="flattop")

    def test_heights_scale_linearly_widths_invariant(self):
        a = psd(lorentzian_corr(8e3, 0.0, nlag=20_000, amp=1.0))
        b = psd(lorentzian_corr(8e3, 0.0, nlag=20_000, amp=7.5))
        pa = find_peaks(a, 0.0).central
        pb = find_peaks(b, 0.0).central
        assert pb.height / pa.height == pytest.approx(7.5, rel=1e-6)
        fa = fit_linewidth(a, pa)
        fb = fit_linewidth(b, pb)
        assert fb.fwhm == pytest.approx(fa.fwhm, rel=1e-9)


def three_tone_spectrum(f_side=2e6, shift=0.0, amp_lo=1.0, amp_hi=1.0,
                        fwhm=20e3, dt=2.5e-8, nlag=30_000):
    lags = np.arange(nlag + 1) * dt
    env = np.exp(-np.pi * fwhm * lags)
    g1 = (2.0 * np.exp(2j * np.pi * shift * lags) * np.exp(-np.pi * 2e3 * lags)
          + amp_lo * env * np.exp(2j * np.pi * (shift - f_side) * lags)
          + amp_hi * env * np.exp(2j * np.pi * (shift + f_side) * lags))
    return psd(CorrelationEstimate(lags=lags, g1=g1))


class TestPeaks:
    def test_three_tones_located(self):
        spec = three_tone_spectrum()
        peaks = find_peaks(spec, delta_pa_hz=2e6)
        assert peaks.central is not None
        assert abs(peaks.central.freq) < spec.bin_hz
        assert peaks.side_lo is not None and peaks.side_hi is not None
        assert peaks.side_lo.freq == pytest.approx(-2e6, abs=2 * spec.bin_hz)
        assert peaks.side_hi.freq == pytest.approx(+2e6, abs=2 * spec.bin_hz)

    def test_side_windows_follow_measured_carrier_shift(self):
        shift = 5e4
        spec = three_tone_spectrum(shift=shift)
        peaks = find_peaks(spec, delta_pa_hz=2e6)
        assert peaks.central.freq == pytest.approx(shift, abs=2 * spec.bin_hz)
        assert peaks.side_hi.freq == pytest.approx(2e6 + shift,
                                                   abs=2 * spec.bin_hz)

    def test_flat_spectrum_reports_all_missing(self):
        freq = np.linspace(-5e6, 5e6, 4001)
        spec = SpectrumResult(freq=freq, psd=np.ones_like(freq))
        peaks = find_peaks(spec, delta_pa_hz=2e6)
        assert peaks.central is None
        assert peaks.side_lo is None and peaks.side_hi is None

    def test_unresolved_tone_carries_lower_bound_flag(self):
        spec = psd(lorentzian_corr(1.0, f0=0.0, nlag=2000))  # << one bin wide
        peaks = find_peaks(spec, delta_pa_hz=0.0)
        fit = fit_linewidth(spec, peaks.central)
        assert fit.lower_bound

    def test_missing_side_peak_not_fabricated(self):
        spec = three_tone_spectrum(amp_lo=0.0)
        peaks = find_peaks(spec, delta_pa_hz=2e6)
        assert peaks.side_lo is None
        assert peaks.side_hi is not None


class TestPulling:
    def test_exact_linear_offsets_recovered(self):
        ratio = 3.7e-4
        det = TWO_PI * np.array([-10e6, 0.0, 10e6])
        offs = ratio * det / TWO_PI
        res = pulling_coefficient(det, offs, kappa=TWO_PI * 50e6, tau=0.4e-6)
        assert res.p == pytest.approx(ratio, rel=1e-12)
        assert res.p_norm == pytest.approx(ratio * TWO_PI * 50e6 * 0.4e-6,
                                           rel=1e-12)

    def test_constant_offsets_give_zero(self):
        det = TWO_PI * np.array([-5e6, 0.0, 5e6])
        res = pulling_coefficient(det, np.full(3, 123.0))
        assert res.p == pytest.approx(0.0, abs=1e-12)
        assert res.p_norm is None

    def test_degenerate_sets_rejected(self):
        with pytest.raises(ValueError):
            pulling_coefficient(TWO_PI * np.array([1e6, 1e6, 1e6]),
                                np.zeros(3))
        with pytest.raises(ValueError):
            pulling_coefficient(TWO_PI * np.array([1e6, 2e6]), np.zeros(2))


class TestContrast:
    def test_equal_heights_give_zero(self):
        assert contrast_ratio(3.3, 3.3) == 0.0

    def test_vanishing_lower_peak_gives_plus_one(self):
        assert contrast_ratio(0.0, 2.0) == 1.0

    def test_sign_convention(self):
        assert contrast_ratio(2.0, 1.0) < 0.0   # higher-detuned peak smaller

    def test_invalid_heights_rejected(self):
        with pytest.raises(ValueError):
            contrast_ratio(0.0, 0.0)
        with pytest.raises(ValueError):
            contrast_ratio(-1.0, 2.0)

    def test_asymmetric_side_peaks_measured_from_spectrum(self):
        spec = three_tone_spectrum(amp_lo=1.2, amp_hi=0.8)
        peaks = find_peaks(spec, delta_pa_hz=2e6)
        flo = fit_linewidth(spec, peaks.side_lo)
        fhi = fit_linewidth(spec, peaks.side_hi)
        c = contrast_ratio(flo.height, fhi.height)
        assert c == pytest.approx((0.8 - 1.2) / 2.0, abs=0.02)

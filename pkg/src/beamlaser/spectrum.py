"""First-order correlation, power spectral density and peak metrics.

The correlation g1(tau) = <J+(t+tau) J-(t)> is estimated over all available
start times of the recorded collective field.  The two-sided spectrum is the
discrete Fourier transform of the Hermitian extension of g1 with kernel
exp(-i 2 pi f tau), so a field component rotating as J+ ~ exp(+i w t)
appears at +w/2pi.  Frequency 0 is the atomic resonance (the dynamics are
written in the atom rotating frame).

Linewidths are extracted by a Lorentzian least-squares fit (with the raw
interpolated FWHM kept as cross-check); a fitted width below two frequency
bins is reported as a lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import fft, ifft, next_fast_len
from scipy.optimize import curve_fit

from .dynamics import FieldRecord


@dataclass
class CorrelationEstimate:
    lags: np.ndarray   # s, tau >= 0 only (g1(-tau) = conj g1(tau))
    g1: np.ndarray     # complex


@dataclass
class Peak:
    freq: float        # Hz, sub-bin interpolated
    height: float      # psd units, interpolated
    fwhm_raw: float    # Hz, half-max crossing estimate


@dataclass
class LinewidthFit:
    fwhm: float            # Hz
    offset: float          # Hz, fitted line center
    height: float          # fitted amplitude above baseline
    fwhm_raw: float        # Hz, interpolated FWHM cross-check
    lower_bound: bool      # true when the width is unresolved (< 2 bins)
    method: str            # "fit" or "interp"


@dataclass
class PeakSet:
    central: Peak | None = None
    side_lo: Peak | None = None
    side_hi: Peak | None = None


@dataclass
class SpectrumResult:
    freq: np.ndarray                   # Hz, two-sided, ascending
    psd: np.ndarray                    # arbitrary units
    peaks: PeakSet = field(default_factory=PeakSet)
    central: LinewidthFit | None = None
    contrast: float | None = None

    @property
    def bin_hz(self) -> float:
        return float(self.freq[1] - self.freq[0]) if self.freq.size > 1 else 0.0


def g1_estimate(record: FieldRecord, max_lag: float) -> CorrelationEstimate:
    """Correlation g1(tau_k) = (1/M_k) sum_t J+(t+tau_k) J-(t), tau_k = k*dt.

    Uses every available start time for each lag (M_k = n - k).  max_lag must
    not exceed a quarter of the recorded span (statistical adequacy).
    """
    x = np.asarray(record.j_plus)
    n = x.size
    dt = record.dt_record
    if n == 0:
        raise ValueError("empty field record")
    span = n * dt
    if max_lag > span / 4.0 + dt * 1e-9:
        raise ValueError(f"max_lag {max_lag:g} exceeds t_record/4 = {span / 4:g}")
    nlag = int(round(max_lag / dt))
    if nlag >= n:
        raise ValueError("record shorter than max_lag")

    nfft = next_fast_len(n + nlag + 1)
    fx = fft(x, nfft)
    corr = ifft(fx * np.conj(fx))[:nlag + 1]
    counts = n - np.arange(nlag + 1)
    g1 = corr / counts
    return CorrelationEstimate(lags=np.arange(nlag + 1) * dt, g1=g1)


def psd(corr: CorrelationEstimate, window: str = "none") -> SpectrumResult:
    """Two-sided spectrum from the Hermitian extension of g1.

    S(f_m) = dt * sum_k w_k g1(tau_k) exp(-i 2 pi f_m tau_k), k = -L..L.
    Parseval holds exactly: sum(psd) * df = g1(0).
    """
    g1 = corr.g1
    nlag = g1.size - 1
    if nlag < 1:
        raise ValueError("need at least two lags")
    dt = float(corr.lags[1] - corr.lags[0])
    if window == "hann":
        w = 0.5 * (1.0 + np.cos(np.pi * np.arange(nlag + 1) / nlag))
    elif window == "none":
        w = np.ones(nlag + 1)
    else:
        raise ValueError(f"unknown window {window!r}")
    gw = g1 * w
    # Wrapped order: tau = 0..L then tau = -L..-1.
    ext = np.concatenate([gw, np.conj(gw[:0:-1])])
    spec = dt * fft(ext)
    freqs = np.fft.fftfreq(2 * nlag + 1, dt)
    order = np.fft.fftshift(np.arange(2 * nlag + 1))
    return SpectrumResult(freq=np.fft.fftshift(freqs), psd=spec.real[order])


def _interp_peak(freq: np.ndarray, p: np.ndarray, i: int):
    """Sub-bin peak position and height by parabolic interpolation."""
    if i <= 0 or i >= p.size - 1:
        return float(freq[i]), float(p[i])
    y0, y1, y2 = p[i - 1], p[i], p[i + 1]
    if y0 > 0 and y1 > 0 and y2 > 0:
        l0, l1, l2 = math.log(y0), math.log(y1), math.log(y2)
    else:
        l0, l1, l2 = y0, y1, y2
    denom = l0 - 2.0 * l1 + l2
    if denom >= 0 or abs(denom) < 1e-300:
        return float(freq[i]), float(p[i])
    shift = 0.5 * (l0 - l2) / denom
    shift = float(np.clip(shift, -0.5, 0.5))
    df = freq[1] - freq[0]
    vertex = l1 - 0.25 * (l0 - l2) * shift
    height = math.exp(vertex) if (y0 > 0 and y1 > 0 and y2 > 0) else vertex
    return float(freq[i] + shift * df), float(height)


def _fwhm_interp(freq: np.ndarray, p: np.ndarray, i: int, height: float,
                 lo: int, hi: int) -> float:
    """Half-max crossing FWHM around bin i, limited to [lo, hi)."""
    half = height / 2.0
    df = freq[1] - freq[0]
    il = i
    while il > lo and p[il] > half:
        il -= 1
    if p[il] > half:
        left = freq[lo]
    else:
        frac = (half - p[il]) / (p[il + 1] - p[il]) if p[il + 1] != p[il] else 0.0
        left = freq[il] + frac * df
    ir = i
    while ir < hi - 1 and p[ir] > half:
        ir += 1
    if p[ir] > half:
        right = freq[hi - 1]
    else:
        frac = (half - p[ir]) / (p[ir - 1] - p[ir]) if p[ir - 1] != p[ir] else 0.0
        right = freq[ir] - frac * df
    return float(max(right - left, df * 1e-3))


def _smooth3(p: np.ndarray) -> np.ndarray:
    """Three-bin boxcar; suppresses single-bin estimation spikes."""
    if p.size < 3:
        return p
    out = p.copy()
    out[1:-1] = (p[:-2] + p[1:-1] + p[2:]) / 3.0
    return out


def _peak_in_window(spec: SpectrumResult, f_lo: float, f_hi: float,
                    floor: float, threshold: float) -> Peak | None:
    freq = spec.freq
    p = _smooth3(spec.psd)
    sel = np.nonzero((freq >= f_lo) & (freq <= f_hi))[0]
    if sel.size < 3:
        return None
    i = int(sel[np.argmax(p[sel])])
    if i == sel[0] or i == sel[-1]:
        return None         # maximum at window edge is not a peak
    if not (p[i] >= p[i - 1] and p[i] >= p[i + 1]):
        return None
    if p[i] <= threshold * floor or p[i] < 1e-5 * p.max():
        return None
    f0, h = _interp_peak(freq, p, i)
    fwhm = _fwhm_interp(freq, p, i, h, int(sel[0]), int(sel[-1]) + 1)
    return Peak(freq=f0, height=h, fwhm_raw=fwhm)


def find_peaks(spec: SpectrumResult, delta_pa_hz: float,
               threshold: float = 5.0) -> PeakSet:
    """Locate the central lasing peak and the two side peaks.

    The central peak is searched in |f| < delta_pa/2 (whole axis when
    delta_pa = 0); side windows are centered at the measured central offset
    +- delta_pa with half-width delta_pa/4.  A window whose maximum does not
    rise above ``threshold`` times the median spectrum is reported missing.
    """
    floor = float(np.median(spec.psd))
    out = PeakSet()
    if delta_pa_hz <= 0:
        out.central = _peak_in_window(spec, spec.freq[0], spec.freq[-1],
                                      floor, threshold)
        return out
    out.central = _peak_in_window(spec, -delta_pa_hz / 2, delta_pa_hz / 2,
                                  floor, threshold)
    shift = out.central.freq if out.central is not None else 0.0
    half = delta_pa_hz / 4.0
    out.side_lo = _peak_in_window(spec, shift - delta_pa_hz - half,
                                  shift - delta_pa_hz + half, floor, threshold)
    out.side_hi = _peak_in_window(spec, shift + delta_pa_hz - half,
                                  shift + delta_pa_hz + half, floor, threshold)
    return out


def _lorentzian(f, amp, f0, fwhm, base):
    return amp / (1.0 + (2.0 * (f - f0) / fwhm) ** 2) + base


def fit_linewidth(spec: SpectrumResult, peak: Peak) -> LinewidthFit:
    """Lorentzian least-squares fit of one peak; falls back to the raw FWHM.

    The fit window spans a few interpolated FWHM around the peak (at least
    8 bins), which keeps the narrow feature dominant over any broad pedestal.
    A result below two bins carries the lower-bound flag and the caller
    should extend the correlation span.
    """
    freq, p = spec.freq, spec.psd
    df = spec.bin_hz
    halfspan = max(4.0 * peak.fwhm_raw, 8.0 * df)
    sel = (freq >= peak.freq - halfspan) & (freq <= peak.freq + halfspan)
    fs, ps = freq[sel], p[sel]

    fitted = None
    if fs.size >= 5:
        base0 = float(np.median(ps))
        p0 = (max(peak.height - base0, peak.height * 0.1),
              peak.freq, max(peak.fwhm_raw, 0.5 * df), base0)
        try:
            popt, _ = curve_fit(
                _lorentzian, fs, ps, p0=p0,
                bounds=([0.0, fs[0], df * 1e-3, -np.inf],
                        [np.inf, fs[-1], 4.0 * halfspan, np.inf]),
                maxfev=10000)
            fitted = popt
        except (RuntimeError, ValueError):
            fitted = None

    if fitted is not None:
        amp, f0, fwhm, _ = (float(v) for v in fitted)
        # A fit much wider than the half-max estimate means the line is not
        # Lorentzian (near-threshold lines are flat-topped, and the fat fit
        # tails latch onto the pedestal); report the direct width instead.
        # Fits narrower than the (smoothing-limited) raw width are trusted.
        if fwhm <= 1.5 * peak.fwhm_raw or peak.fwhm_raw < 3.0 * df:
            return LinewidthFit(fwhm=fwhm, offset=f0, height=amp,
                                fwhm_raw=peak.fwhm_raw,
                                lower_bound=fwhm < 2.0 * df, method="fit")
    return LinewidthFit(fwhm=peak.fwhm_raw, offset=peak.freq,
                        height=peak.height, fwhm_raw=peak.fwhm_raw,
                        lower_bound=peak.fwhm_raw < 2.0 * df, method="interp")


@dataclass(frozen=True)
class PullingResult:
    p: float                 # d(offset)/d(detuning/2pi), dimensionless
    p_norm: float | None     # P * kappa * tau when kappa, tau supplied


def pulling_coefficient(detunings: np.ndarray, offsets_hz: np.ndarray,
                        kappa: float | None = None,
                        tau: float | None = None) -> PullingResult:
    """Least-squares pulling coefficient from (cavity-atom detuning, offset).

    ``detunings`` are angular (rad/s); offsets in Hz.  P is the slope of
    offset versus detuning/2pi, so P = 1 would mean the emission follows the
    cavity one-for-one.
    """
    d = np.asarray(detunings, dtype=np.float64) / (2.0 * np.pi)
    y = np.asarray(offsets_hz, dtype=np.float64)
    if d.size < 3:
        raise ValueError("need at least 3 detunings")
    if np.ptp(d) == 0.0:
        raise ValueError("degenerate detuning set")
    slope = float(np.polyfit(d, y, 1)[0])
    norm = slope * kappa * tau if (kappa is not None and tau is not None) else None
    return PullingResult(p=slope, p_norm=norm)


def contrast_ratio(h_lo: float, h_hi: float) -> float:
    """Side-peak contrast (h_> - h_<)/(h_> + h_<).

    h_hi is the height of the side peak at the higher frequency detuning,
    h_lo at the lower.  +1 when the lower peak vanishes.
    """
    if h_lo < 0 or h_hi < 0 or (h_lo == 0 and h_hi == 0):
        raise ValueError("side peak heights must be nonnegative and not both zero")
    return (h_hi - h_lo) / (h_hi + h_lo)


def write_spectrum(spec: SpectrumResult, path: str, meta: str = "") -> None:
    """Write the spectrum as a two-column table (freq_hz, psd)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# beamlaser spectrum\n")
        if meta:
            fh.write(f"# {meta}\n")
        fh.write("freq_hz\tpsd\n")
        for f, s in zip(spec.freq, spec.psd):
            fh.write(f"{f:.10g}\t{s:.10g}\n")

"""Sampled-signal container and the frequency-domain primitives shared by every stage.

All waveforms, optical or electrical, live in a :class:`SampledSignal`.
Amplitudes are in sqrt(mW) so that ``mean(|x|**2)`` is a power in mW.
A signal is either a single track of shape ``(n,)`` or a stack of
polarization tracks of shape ``(n_tracks, n)``; power is always summed over
tracks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import signal as sps

__all__ = [
    "SampledSignal",
    "SpectrumEstimate",
    "BandOverflowError",
    "AliasingError",
    "frequency_shift",
    "resample",
    "combine",
    "estimate_psd",
    "measure_power_dbm",
    "power_mw",
    "occupied_band",
    "apply_frequency_response",
    "add_awgn",
    "BELOW_FLOOR",
]

BELOW_FLOOR = float("-inf")
# psd floor in mW/Hz; keeps dB values finite for empty bins
_PSD_FLOOR = 1e-30


class BandOverflowError(ValueError):
    """A frequency shift would push occupied spectrum past the Nyquist edge."""


class AliasingError(ValueError):
    """A requested sample rate cannot represent the occupied band."""


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Uniformly sampled complex waveform.

    Parameters
    ----------
    samples : array_like
        Complex amplitudes in sqrt(mW), shape ``(n,)`` or ``(n_tracks, n)``.
    sample_rate : float
        Sampling rate in Hz.
    center_offset : float
        Frequency, relative to the ROADM channel center, that the baseband
        0 Hz of ``samples`` corresponds to. Every signal placed in the same
        composite window shares one value (normally 0).
    """

    samples: np.ndarray
    sample_rate: float
    center_offset: float = 0.0

    def __post_init__(self):
        x = np.array(self.samples, dtype=np.complex128, copy=True)
        if x.ndim not in (1, 2) or x.shape[-1] == 0:
            raise ValueError("samples must be a non-empty 1-D or 2-D array")
        if not np.all(np.isfinite(x)):
            raise ValueError("samples must be finite")
        if not self.sample_rate > 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        object.__setattr__(self, "center_offset", float(self.center_offset))

    @property
    def n_samples(self) -> int:
        return self.samples.shape[-1]

    @property
    def n_tracks(self) -> int:
        return 1 if self.samples.ndim == 1 else self.samples.shape[0]

    @property
    def duration(self) -> float:
        return self.n_samples / self.sample_rate

    @property
    def is_real(self) -> bool:
        return not np.any(self.samples.imag)

    def time(self) -> np.ndarray:
        return np.arange(self.n_samples) / self.sample_rate

    def frequencies(self) -> np.ndarray:
        """FFT-ordered bin frequencies relative to the channel center."""
        return np.fft.fftfreq(self.n_samples, 1.0 / self.sample_rate) + self.center_offset

    def replace(self, samples: np.ndarray) -> "SampledSignal":
        return SampledSignal(samples, self.sample_rate, self.center_offset)

    def track(self, index: int) -> "SampledSignal":
        if self.samples.ndim == 1:
            if index != 0:
                raise IndexError("single-track signal")
            return self
        return self.replace(self.samples[index])


@dataclass(frozen=True)
class SpectrumEstimate:
    """Two-sided PSD on a strictly increasing frequency grid (Hz, dBm/Hz)."""

    frequencies: np.ndarray
    psd: np.ndarray

    @property
    def psd_linear(self) -> np.ndarray:
        """PSD in mW/Hz."""
        return 10.0 ** (self.psd / 10.0)

    @property
    def resolution(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])

    def integrate(self, f_lo: float = -np.inf, f_hi: float = np.inf) -> float:
        """Power in mW between two frequencies (bin-sum)."""
        mask = (self.frequencies >= f_lo) & (self.frequencies <= f_hi)
        return float(np.sum(self.psd_linear[mask]) * self.resolution)


def power_mw(sig: SampledSignal) -> float:
    """Mean power in mW, summed over tracks."""
    x = np.atleast_2d(sig.samples)
    return float(np.sum(np.mean(x.real**2 + x.imag**2, axis=-1)))


def measure_power_dbm(sig: SampledSignal) -> float:
    """Power in dBm; an all-zero signal returns ``BELOW_FLOOR`` (-inf)."""
    p = power_mw(sig)
    if p <= 0.0:
        return BELOW_FLOOR
    return float(10.0 * np.log10(p))


def occupied_band(sig: SampledSignal, tail: float = 1e-6) -> tuple[float, float]:
    """Frequency extent (relative to the sample-frame baseband) holding all
    but ``tail`` of the energy on each side."""
    x = np.atleast_2d(sig.samples)
    spec = np.fft.fftshift(np.sum(np.abs(np.fft.fft(x, axis=-1)) ** 2, axis=0))
    f = np.fft.fftshift(np.fft.fftfreq(sig.n_samples, 1.0 / sig.sample_rate))
    total = spec.sum()
    if total == 0.0:
        return 0.0, 0.0
    cdf = np.cumsum(spec) / total
    lo = int(np.searchsorted(cdf, tail))
    hi = int(np.searchsorted(cdf, 1.0 - tail))
    hi = min(hi, len(f) - 1)
    return float(f[lo]), float(f[hi])


def frequency_shift(sig: SampledSignal, delta: float) -> SampledSignal:
    """Translate the spectrum of ``sig`` by ``delta`` Hz.

    Raises
    ------
    BandOverflowError
        If the shifted occupied band leaves the Nyquist window.
    """
    if delta == 0.0:
        return sig
    nyq = sig.sample_rate / 2.0
    if abs(delta) >= nyq:
        raise BandOverflowError(f"shift {delta:.4g} Hz exceeds Nyquist {nyq:.4g} Hz")
    f_lo, f_hi = occupied_band(sig)
    if f_lo + delta < -nyq or f_hi + delta > nyq:
        raise BandOverflowError(
            f"occupied band [{f_lo:.4g}, {f_hi:.4g}] Hz shifted by {delta:.4g} Hz "
            f"leaves the +/-{nyq:.4g} Hz window"
        )
    phasor = np.exp(2j * np.pi * delta * sig.time())
    return sig.replace(sig.samples * phasor)


def resample(sig: SampledSignal, new_rate: float) -> SampledSignal:
    """Band-limited (Fourier) resampling to ``new_rate``.

    The record duration is preserved, so ``n * new_rate / sample_rate`` must be
    an integer.
    """
    if new_rate == sig.sample_rate:
        return sig
    n_new = sig.n_samples * new_rate / sig.sample_rate
    if abs(n_new - round(n_new)) > 1e-6:
        raise ValueError(f"record of {sig.n_samples} samples does not map to an integer "
                         f"length at {new_rate:.6g} Hz")
    n_new = int(round(n_new))
    f_lo, f_hi = occupied_band(sig)
    if f_lo < -new_rate / 2 or f_hi > new_rate / 2:
        raise AliasingError(f"occupied band [{f_lo:.4g}, {f_hi:.4g}] Hz does not fit "
                            f"at {new_rate:.4g} Hz")
    y = sps.resample(sig.samples, n_new, axis=-1)
    # fourier resampling preserves amplitude per sample, so power is unchanged
    return SampledSignal(y, new_rate, sig.center_offset)


def combine(signals: Sequence[SampledSignal],
            insertion_loss_db: float | Sequence[float] = 0.0) -> SampledSignal:
    """Ideal coupler: elementwise sum with optional per-port loss.

    Shorter inputs are zero-padded at the end; a single-track input added to a
    multi-track one lands on track 0.
    """
    if not signals:
        raise ValueError("nothing to combine")
    rate = signals[0].sample_rate
    offset = signals[0].center_offset
    for s in signals[1:]:
        if s.sample_rate != rate:
            raise ValueError("sample rates differ; resample before combining")
        if s.center_offset != offset:
            raise ValueError("center offsets differ; signals must share one window")
    losses = np.broadcast_to(np.asarray(insertion_loss_db, dtype=float), (len(signals),))
    n = max(s.n_samples for s in signals)
    tracks = max(s.n_tracks for s in signals)
    out = np.zeros((tracks, n), dtype=np.complex128)
    for s, il in zip(signals, losses):
        x = np.atleast_2d(s.samples)
        out[: x.shape[0], : x.shape[1]] += x * 10.0 ** (-il / 20.0)
    if tracks == 1:
        out = out[0]
    return SampledSignal(out, rate, offset)


def apply_frequency_response(sig: SampledSignal,
                             response: Callable[[np.ndarray], np.ndarray]) -> SampledSignal:
    """Multiply the spectrum by ``response(f)``, f relative to the channel center."""
    H = response(sig.frequencies())
    X = np.fft.fft(sig.samples, axis=-1)
    return sig.replace(np.fft.ifft(X * H, axis=-1))


def estimate_psd(sig: SampledSignal, segment_len: int, overlap: float = 0.5,
                 window: str = "hann") -> SpectrumEstimate:
    """Averaged-periodogram (Welch) PSD in dBm/Hz.

    ``window='boxcar'`` with ``segment_len == n_samples`` gives the raw DFT
    periodogram, for which Parseval holds exactly.
    """
    if segment_len > sig.n_samples:
        raise ValueError(f"segment_len {segment_len} exceeds signal length {sig.n_samples}")
    if not 0.0 <= overlap < 1.0:
        raise ValueError("overlap must be in [0, 1)")
    noverlap = int(segment_len * overlap)
    f, p = sps.welch(sig.samples, fs=sig.sample_rate, window=window, nperseg=segment_len,
                     noverlap=noverlap, return_onesided=False, scaling="density",
                     detrend=False, axis=-1)
    p = np.atleast_2d(p).sum(axis=0)
    f = np.fft.fftshift(f) + sig.center_offset
    p = np.fft.fftshift(p)
    psd_db = 10.0 * np.log10(np.maximum(p, _PSD_FLOOR))
    return SpectrumEstimate(f, psd_db)


def add_awgn(sig: SampledSignal, snr_db: float, bandwidth: float,
             rng: np.random.Generator) -> SampledSignal:
    """Add white Gaussian noise so the in-band SNR over ``bandwidth`` is ``snr_db``.

    For a real signal ``bandwidth`` is the one-sided occupied width and the noise
    is real; for a complex signal it is the two-sided width and the noise is
    circular complex.
    """
    p = power_mw(sig) / sig.n_tracks
    snr = 10.0 ** (snr_db / 10.0)
    shape = sig.samples.shape
    if sig.is_real:
        var = p * sig.sample_rate / (2.0 * bandwidth * snr)
        noise = rng.standard_normal(shape) * np.sqrt(var)
    else:
        var = p * sig.sample_rate / (bandwidth * snr)
        noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(var / 2)
    return sig.replace(sig.samples + noise)

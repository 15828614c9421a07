"""Electro-optic and fiber plant: MZM, linear fiber, EDFA with ASE, square-law PD.

Optical fields are in sqrt(mW) relative to the ROADM channel center; the
photocurrent comes out in mA.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT, e as Q_ELECTRON, h as H_PLANCK

from .signal import SampledSignal, apply_frequency_response

__all__ = [
    "MzmParams",
    "FiberParams",
    "EdfaParams",
    "PdParams",
    "mzm_modulate",
    "beta2",
    "dispersion_response",
    "disperse",
    "attenuate",
    "fiber_propagate",
    "ase_psd_mw",
    "edfa_amplify",
    "osnr_db",
    "photodetect",
]


@dataclass(frozen=True)
class MzmParams:
    """``drive_rms`` rescales the drive waveform to that many volts RMS;
    ``None`` takes the drive samples as volts."""

    v_pi: float = 4.0
    bias: float = 0.5
    drive_rms: float | None = 0.3
    laser_power: float = 10.0  # dBm

    def __post_init__(self):
        if not self.v_pi > 0:
            raise ValueError("v_pi must be positive")
        if not 0.0 < self.bias < 1.0:
            raise ValueError("bias must lie strictly between 0 and 1 (fraction of v_pi)")

    @property
    def modulation_index(self) -> float:
        """RMS phase swing of the interferometer arm difference, in radians."""
        return np.pi * (self.drive_rms or 0.0) / self.v_pi


def mzm_modulate(drive: SampledSignal, p: MzmParams) -> SampledSignal:
    """Push-pull MZM: ``E = sqrt(P) cos(pi/2 (bias + v(t) / v_pi))``.

    No small-signal expansion: the raised-cosine transfer is applied exactly, so
    harmonics and intermodulation appear naturally.
    """
    v = drive.samples.real
    if p.drive_rms is not None:
        rms = np.sqrt(np.mean(v**2))
        if rms > 0:
            v = v * (p.drive_rms / rms)
    amp = np.sqrt(10.0 ** (p.laser_power / 10.0))
    return drive.replace(amp * np.cos(0.5 * np.pi * (p.bias + v / p.v_pi)))


@dataclass(frozen=True)
class FiberParams:
    length: float  # km
    attenuation: float = 0.2  # dB/km
    dispersion: float = 17.0  # ps/(nm km)
    reference_wavelength: float = 1550.0  # nm

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("fiber length must be non-negative")
        if self.attenuation < 0:
            raise ValueError("attenuation must be non-negative")

    @property
    def loss_db(self) -> float:
        return self.attenuation * self.length


def beta2(p: FiberParams) -> float:
    """Group-velocity dispersion in s^2/m."""
    lam = p.reference_wavelength * 1e-9
    d = p.dispersion * 1e-6  # ps/(nm km) -> s/m^2
    return -d * lam**2 / (2 * np.pi * C_LIGHT)


def dispersion_response(f, accumulated: float, wavelength: float = 1550.0) -> np.ndarray:
    """``exp(-j beta2 L / 2 omega^2)`` for an accumulated dispersion ``D L`` in ps/nm."""
    lam = wavelength * 1e-9
    b2l = -accumulated * 1e-3 * lam**2 / (2 * np.pi * C_LIGHT)  # ps/nm -> s/m, times lambda^2/2pi c
    return np.exp(-0.5j * b2l * (2 * np.pi * np.asarray(f, dtype=float)) ** 2)


def disperse(sig: SampledSignal, p: FiberParams) -> SampledSignal:
    """All-pass chromatic dispersion ``exp(-j beta2/2 omega^2 L)``."""
    if p.length == 0 or p.dispersion == 0:
        return sig
    dl = p.dispersion * p.length
    return apply_frequency_response(
        sig, lambda f: dispersion_response(f, dl, p.reference_wavelength))


def attenuate(sig: SampledSignal, loss_db: float) -> SampledSignal:
    if loss_db == 0:
        return sig
    return sig.replace(sig.samples * 10.0 ** (-loss_db / 20.0))


def fiber_propagate(sig: SampledSignal, p: FiberParams) -> SampledSignal:
    """Linear single-mode fiber: dispersion then span loss."""
    return attenuate(disperse(sig, p), p.loss_db)


@dataclass(frozen=True)
class EdfaParams:
    gain: float  # dB
    noise_figure: float = 5.0  # dB
    wavelength: float = 1550.0  # nm
    include_ase: bool = True

    def __post_init__(self):
        if self.gain < 0:
            raise ValueError("EDFA gain must be non-negative")
        if self.noise_figure < 3.0:
            warnings.warn(f"noise figure {self.noise_figure} dB is below the 3 dB quantum limit",
                          stacklevel=2)


def ase_psd_mw(p: EdfaParams) -> float:
    """Single-polarization ASE density in mW/Hz: ``(G - 1) h nu NF / 2``."""
    g = 10.0 ** (p.gain / 10.0)
    nf = 10.0 ** (p.noise_figure / 10.0)
    nu = C_LIGHT / (p.wavelength * 1e-9)
    return (g - 1.0) * H_PLANCK * nu * nf / 2.0 * 1e3


def edfa_amplify(sig: SampledSignal, p: EdfaParams,
                 rng: np.random.Generator) -> SampledSignal:
    """Scale the field by the gain and add white complex ASE on every track,
    spread over the whole simulation window."""
    if p.gain == 0:
        return sig
    x = sig.samples * 10.0 ** (p.gain / 20.0)
    if not p.include_ase:
        return sig.replace(x)
    var = ase_psd_mw(p) * sig.sample_rate
    noise = rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)
    return sig.replace(x + noise * np.sqrt(var / 2.0))


def osnr_db(p_in_dbm: float, p: EdfaParams, b_ref: float = 12.5e9) -> float:
    """OSNR after one amplifier against the per-track ASE in ``b_ref``.

    Equals ``P_in - NF - 10 log10(h nu B_ref) + 10 log10(2 G / (G - 1))``; the
    usual dual-polarization figure is 3 dB lower.
    """
    p_out = 10.0 ** ((p_in_dbm + p.gain) / 10.0)
    return float(10.0 * np.log10(p_out / (ase_psd_mw(p) * b_ref)))


@dataclass(frozen=True)
class PdParams:
    responsivity: float = 0.8  # A/W
    thermal_noise_density: float = 0.0  # A/sqrt(Hz), one-sided
    include_shot_noise: bool = False

    def __post_init__(self):
        if not self.responsivity > 0:
            raise ValueError("responsivity must be positive")


def photodetect(field: SampledSignal, p: PdParams,
                rng: np.random.Generator | None = None) -> SampledSignal:
    """Square-law detection summed over tracks, ``i = R |E|^2`` in mA, plus
    thermal and optional shot noise over the full simulation bandwidth."""
    x = np.atleast_2d(field.samples)
    i = p.responsivity * np.sum(x.real**2 + x.imag**2, axis=0)
    fs = field.sample_rate
    var = 0.0
    if p.thermal_noise_density > 0:
        var += (p.thermal_noise_density * 1e3) ** 2 * fs / 2.0
    if p.include_shot_noise:
        # 2 q I (fs/2), I in A, expressed in mA^2
        var += Q_ELECTRON * np.mean(i) * 1e-3 * fs * 1e6
    if var > 0:
        if rng is None:
            raise ValueError("a random generator is required when noise is enabled")
        i = i + rng.standard_normal(i.shape) * np.sqrt(var)
    # electrical baseband: no optical frequency reference
    return SampledSignal(i.astype(np.complex128), fs)

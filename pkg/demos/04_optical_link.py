"""
The ARoF optical link: modulator, fiber, amplifier, photodiode
===============================================================

An RF tone on a Mach-Zehnder modulator at quadrature gives a carrier with two
sidebands. After fiber, dispersion rotates the sidebands against each other,
so the detected RF power fades as cos^2 of the accumulated phase.
"""

import numpy as np

from arofsim.optics import (EdfaParams, FiberParams, MzmParams, PdParams, beta2, disperse,
                            edfa_amplify, fiber_propagate, mzm_modulate, osnr_db, photodetect)
from arofsim.signal import SampledSignal, measure_power_dbm

fs, n, f = 64e9, 1 << 14, 10e9
drive = SampledSignal(0.1 * np.sin(2 * np.pi * f * np.arange(n) / fs), fs)
field = mzm_modulate(drive, MzmParams(drive_rms=None, laser_power=4.0))
print(f"modulator output {measure_power_dbm(field):.2f} dBm")


def rf_power(x):
    spec = np.fft.fft(photodetect(x, PdParams()).samples.real)
    return np.abs(spec[round(f / fs * n)]) ** 2


# fading of a 10 GHz tone; the first null is near 37 km
p0 = rf_power(field)
for km in (0, 10, 20, 30, 36):
    phi = beta2(FiberParams(km)) * km * 1e3 * (2 * np.pi * f) ** 2 / 2
    got = 10 * np.log10(rf_power(disperse(field, FiberParams(km))) / p0 + 1e-30)
    print(f"{km:3d} km: RF fading {got:7.2f} dB, cos^2 law {10 * np.log10(np.cos(phi) ** 2):7.2f} dB")

# fiber loss then an EDFA that puts it back
out = fiber_propagate(field, FiberParams(47))
amp = EdfaParams(gain=9.4, noise_figure=5.0)
out = edfa_amplify(out, amp, np.random.default_rng(0))
print(f"after 47 km and the EDFA: {measure_power_dbm(out):.2f} dBm, "
      f"OSNR {osnr_db(measure_power_dbm(field) - 9.4, amp):.1f} dB in 0.1 nm")

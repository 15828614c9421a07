"""
OFDM on an intermediate frequency: EVM versus SNR
==================================================

The ARoF payload is a 64-QAM OFDM signal on a 2 GHz IF. In white noise the
RMS EVM should follow 10**(-SNR/20); here we check that across a few SNRs.
"""

import numpy as np

from arofsim.ofdm import OfdmConfig, compute_evm, demodulate, modulate
from arofsim.signal import add_awgn

# 200 MHz of subcarriers at 1.5625 MHz spacing, synthesized at 128 GS/s
cfg = OfdmConfig.for_bandwidth(200e6, 128e9, n_symbols=8)
print(f"{cfg.n_data_sc} subcarriers, raw rate {cfg.raw_bit_rate / 1e9:.1f} Gb/s, "
      f"net {cfg.net_bit_rate / 1e9:.2f} Gb/s")

frame = modulate(cfg)
rng = np.random.default_rng(1)
for snr in (15, 20, 25, 30):
    # SNR is measured over the occupied OFDM bandwidth
    rx = add_awgn(frame.tx_waveform, snr, cfg.bandwidth, rng)
    rep = compute_evm(demodulate(rx, frame), frame.reference_symbols)
    print(f"SNR {snr} dB: EVM {rep.evm_rms:5.2f} % "
          f"(theory {100 * 10 ** (-snr / 20):5.2f} %), pass 8 %: {rep.passed}")

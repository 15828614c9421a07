"""
ROADM passbands and the receive-side WSS
=========================================

Each ROADM is a super-Gaussian passband. Cascading them narrows the channel,
which hurts the ARoF signals near the edges but leaves the coherent center flat.
The WSS then splits the channel into three ports.
"""

import numpy as np

from arofsim.filters import build_demux, cascade, cascade_bw_3db, roadm_profile
from arofsim.planner import PLAN_PRESETS, allocate

roadm = roadm_profile(50e9, order=4)
for k in (1, 2, 3, 4):
    bw = cascade_bw_3db(cascade([roadm] * k))
    print(f"{k} ROADMs: 3 dB width {bw / 1e9:.2f} GHz (law {50 * k ** (-1 / 8):.2f} GHz)")

# attenuation at the outer edge of the 1.6 GHz ARoF signal versus the center
a = allocate(PLAN_PRESETS["100G"])
edge = a.carrier_offset_high + a.span_per_arof / 2
for k in (1, 2):
    h = cascade([roadm] * k).response(np.array([0.0, edge]))
    print(f"{k} ROADMs: center {20 * np.log10(h[0]):.2f} dB, ARoF outer edge "
          f"{20 * np.log10(h[1]):.2f} dB")

demux = build_demux(a, order=4, insertion_loss=2.0)
for name, port in demux.ports.items():
    print(f"WSS port {name:9s}: center {port.center / 1e9:+7.2f} GHz, "
          f"width {port.bw_3db / 1e9:.2f} GHz")

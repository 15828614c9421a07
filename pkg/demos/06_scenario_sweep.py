"""
End-to-end scenarios: EVM across topologies and bandwidths
===========================================================

Two ARoF signals and a coherent service share one ROADM channel over the back
to back reference and topologies A, B and C. A reduced sweep keeps this quick;
use `arofsim sweep` for the full matrix.
"""

from arofsim.topology import run_cell, sweep

cells = sweep(topologies=["baseline", "A", "B", "C"], bandwidths=[200e6, 1.6e9],
              presets=["100G"], n_symbols=8)
print("topology  bw MHz   EVM low  EVM high   Q dB")
for c in cells:
    r = c.result
    print(f"{c.topology:8s} {c.bandwidth / 1e6:7.0f} {r.evm_low.evm_rms:8.2f} "
          f"{r.evm_high.evm_rms:9.2f} {r.q_report.q_db:6.2f}")

# one cell in detail: the power ledger along the light path
r = run_cell("400G", "C", 800e6, n_symbols=8)
for stage, kind, p in r.power_ledger:
    print(f"  {stage:16s} {kind:9s} {p:7.2f} dBm")

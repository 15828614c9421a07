"""
Fitting ARoF carriers into a coherent ROADM channel
===================================================

A coherent transponder rarely fills its ROADM channel. This script shows how
much room is left on either side and how wide an ARoF signal can be before its
dual-sideband spectrum no longer fits.
"""

from dataclasses import replace

from arofsim.planner import PLAN_PRESETS, allocate, sweep_feasibility

# 100G sits in a 50 GHz channel, 400G in a 100 GHz one
for name, plan in PLAN_PRESETS.items():
    a = allocate(plan)
    print(f"{name}: {plan.free_total / 1e9:.2f} GHz free in total, "
          f"{a.free_per_side / 1e9:.2f} GHz per side")
    print(f"  carriers at {a.carrier_offset_low / 1e9:+.2f} and "
          f"{a.carrier_offset_high / 1e9:+.2f} GHz from the channel center")

# a DSB signal on a 2 GHz IF spans 2 * (IF + BW/2); scan the bandwidth
table = sweep_feasibility(PLAN_PRESETS["100G"], [0.2e9, 0.8e9, 1.6e9, 2.0e9, 2.4e9])
for row in table.as_records():
    state = "fits" if row["feasible"] else "does not fit"
    print(f"  {row['bw_mhz']:6.0f} MHz: span {row['span_ghz']:.2f} GHz, "
          f"slack {row['slack_ghz']:+.2f} GHz, {state}")
print(f"  largest bandwidth that fits: {table.max_feasible_bw / 1e9:.2f} GHz")

# a guard band to both edges eats into that
guarded = allocate(replace(PLAN_PRESETS["100G"], guard=0.2e9))
print(f"with 200 MHz guards the 1.6 GHz signal has {guarded.slack / 1e9:+.2f} GHz slack")

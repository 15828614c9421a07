"""Placement of ARoF carriers in the unfilled edges of a ROADM channel.

A coherent service of occupied width ``W_c`` sits at the channel center, which
leaves ``(W_ch - W_c) / 2`` free on each side. Each dual-sideband ARoF signal
spans ``2 * (f_IF + B / 2)`` around its optical carrier; the carrier is put in
the middle of its side region.

All arithmetic is done on Hz values that are whole numbers, so the quoted
presets (e.g. 50 GHz minus 37.64 GHz) come out exact in binary floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

__all__ = [
    "ChannelPlan",
    "Allocation",
    "FeasibilityTable",
    "allocate",
    "max_feasible_bandwidth",
    "sweep_feasibility",
    "PLAN_PRESETS",
]


@dataclass(frozen=True)
class ChannelPlan:
    """ROADM channel shared between one coherent service and two ARoF signals.

    Attributes
    ----------
    channel_width : float
        ROADM channel width in Hz.
    coherent_occupied : float
        Occupied width of the coherent signal in Hz.
    if_freq : float
        ARoF intermediate frequency in Hz.
    arof_bw : float
        OFDM signal bandwidth in Hz.
    guard : float
        Minimum margin to the coherent edge and to the channel edge, in Hz.
    """

    channel_width: float
    coherent_occupied: float
    if_freq: float = 2e9
    arof_bw: float = 1.6e9
    guard: float = 0.0

    def __post_init__(self):
        if self.coherent_occupied > self.channel_width:
            raise ValueError(
                f"coherent occupied width {self.coherent_occupied / 1e9:g} GHz exceeds "
                f"channel width {self.channel_width / 1e9:g} GHz")
        if self.arof_bw <= 0:
            raise ValueError("arof_bw must be positive")
        if self.if_freq <= self.arof_bw / 2:
            raise ValueError("if_freq must exceed half the ARoF bandwidth")
        if self.guard < 0:
            raise ValueError("guard must be non-negative")

    @property
    def free_per_side(self) -> float:
        return (self.channel_width - self.coherent_occupied) / 2

    @property
    def free_total(self) -> float:
        return self.channel_width - self.coherent_occupied

    @property
    def span_per_arof(self) -> float:
        return 2 * (self.if_freq + self.arof_bw / 2)


@dataclass(frozen=True)
class Allocation:
    """Outcome of :func:`allocate`. ``slack`` < 0 is the deficit of an
    infeasible plan."""

    plan: ChannelPlan
    feasible: bool
    carrier_offset_low: float
    carrier_offset_high: float
    free_per_side: float
    span_per_arof: float
    slack: float
    occupancy_ratio: float

    @property
    def deficit(self) -> float:
        return max(0.0, -self.slack)

    @property
    def free_total(self) -> float:
        return 2 * self.free_per_side

    @property
    def coherent_edge(self) -> float:
        return self.plan.coherent_occupied / 2

    @property
    def channel_edge(self) -> float:
        return self.plan.channel_width / 2


def allocate(plan: ChannelPlan) -> Allocation:
    """Center one ARoF carrier in each free side region.

    Infeasibility is reported through ``feasible`` and ``slack`` rather than
    raised, so sweeps can run past it.
    """
    free = plan.free_per_side
    span = plan.span_per_arof
    carrier = plan.coherent_occupied / 2 + free / 2
    # the DSB extent [carrier - span/2, carrier + span/2] must sit inside
    # [coherent edge + guard, channel edge - guard]; centered placement reduces
    # that to span + 2*guard <= free
    slack = free - span - 2 * plan.guard
    return Allocation(
        plan=plan,
        feasible=slack >= 0,
        carrier_offset_low=-carrier,
        carrier_offset_high=carrier,
        free_per_side=free,
        span_per_arof=span,
        slack=slack,
        occupancy_ratio=plan.arof_bw / plan.channel_width,
    )


def max_feasible_bandwidth(plan: ChannelPlan) -> float:
    """Largest ARoF bandwidth that still fits: ``2 * (free/2 - guard - IF)``."""
    return 2 * (plan.free_per_side / 2 - plan.guard - plan.if_freq)


@dataclass(frozen=True)
class FeasibilityTable:
    rows: tuple[Allocation, ...]
    max_feasible_bw: float

    def as_records(self) -> list[dict]:
        return [
            {
                "bw_mhz": a.plan.arof_bw / 1e6,
                "feasible": a.feasible,
                "free_per_side_ghz": a.free_per_side / 1e9,
                "free_total_ghz": a.free_total / 1e9,
                "span_ghz": a.span_per_arof / 1e9,
                "slack_ghz": a.slack / 1e9,
                "occupancy_ratio": a.occupancy_ratio,
                "carrier_offset_ghz": a.carrier_offset_high / 1e9,
            }
            for a in self.rows
        ]


def sweep_feasibility(plan: ChannelPlan, bandwidths: Iterable[float]) -> FeasibilityTable:
    """Allocate ``plan`` at each ARoF bandwidth and report the closed-form limit."""
    bws = list(bandwidths)
    if not bws:
        raise ValueError("bandwidth list is empty")
    rows = tuple(allocate(replace(plan, arof_bw=bw)) for bw in bws)
    return FeasibilityTable(rows, max_feasible_bandwidth(plan))


# coherent occupied widths as the transponder vendor quotes them
PLAN_PRESETS = {
    "100G": ChannelPlan(channel_width=50e9, coherent_occupied=37.64e9),
    "400G": ChannelPlan(channel_width=100e9, coherent_occupied=82.46e9),
}

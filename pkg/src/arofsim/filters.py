"""Super-Gaussian ROADM and WSS passbands, cascades, and the receive-side demux."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.optimize import brentq

from .planner import Allocation
from .signal import SampledSignal, apply_frequency_response

__all__ = [
    "FilterProfile",
    "FilterCascade",
    "DemuxPlan",
    "apply_filter",
    "cascade",
    "cascade_bw_3db",
    "build_demux",
    "roadm_profile",
    "PORT_NAMES",
]

_LN2 = np.log(2.0)

PORT_NAMES = ("arof_low", "coherent", "arof_high")


@dataclass(frozen=True)
class FilterProfile:
    """Zero-phase super-Gaussian passband.

    The amplitude response is
    ``10**(-IL/20) * exp(-ln2/2 * (2 (f - center) / bw_3db)**(2 order))``
    so the power response is exactly half (plus IL) at ``center +/- bw_3db/2``.
    """

    center: float
    bw_3db: float
    order: int = 4
    insertion_loss: float = 0.0

    def __post_init__(self):
        if not self.bw_3db > 0:
            raise ValueError("bw_3db must be positive")
        if int(self.order) != self.order or self.order < 1:
            raise ValueError("order must be an integer >= 1")

    def response(self, f) -> np.ndarray:
        x = 2.0 * (np.asarray(f, dtype=float) - self.center) / self.bw_3db
        # x**(2n) overflows for far-out bins at high order; clip the exponent
        expo = np.minimum(np.abs(x) ** (2 * self.order), 1e4)
        return 10.0 ** (-self.insertion_loss / 20.0) * np.exp(-0.5 * _LN2 * expo)

    @property
    def edges(self) -> tuple[float, float]:
        return self.center - self.bw_3db / 2, self.center + self.bw_3db / 2


@dataclass(frozen=True)
class FilterCascade:
    """Pointwise product of several profiles (filters traversed in series)."""

    profiles: tuple[FilterProfile, ...]

    def response(self, f) -> np.ndarray:
        h = np.ones_like(np.asarray(f, dtype=float))
        for p in self.profiles:
            h = h * p.response(f)
        return h

    @property
    def insertion_loss(self) -> float:
        return float(sum(p.insertion_loss for p in self.profiles))


Filter = Union[FilterProfile, FilterCascade]


def cascade(filters: Sequence[FilterProfile]) -> FilterCascade:
    if not filters:
        raise ValueError("empty cascade")
    return FilterCascade(tuple(filters))


def cascade_bw_3db(filt: Filter, center: float | None = None) -> float:
    """Numerically measured 3 dB width of a single-peaked response.

    The half-power points are located by root finding on the actual response,
    relative to its value at ``center``.
    """
    profiles = filt.profiles if isinstance(filt, FilterCascade) else (filt,)
    if center is None:
        center = float(np.mean([p.center for p in profiles]))
    peak = float(filt.response(center)) ** 2
    widest = max(p.bw_3db for p in profiles)

    def g(f):
        return float(filt.response(f)) ** 2 - peak / 2

    hi = brentq(g, center, center + 4 * widest, xtol=1e-9 * widest, rtol=1e-15)
    lo = brentq(g, center - 4 * widest, center, xtol=1e-9 * widest, rtol=1e-15)
    return hi - lo


def apply_filter(sig: SampledSignal, filt: Filter) -> SampledSignal:
    """Multiply the spectrum of ``sig`` by the filter's (real) response."""
    return apply_frequency_response(sig, filt.response)


def roadm_profile(channel_width: float, order: int = 4, insertion_loss: float = 0.0,
                  order_reference_width: float | None = None) -> FilterProfile:
    """Add/drop passband of one ROADM for a channel centered at 0 Hz.

    With ``order_reference_width`` set, the order is scaled by
    ``channel_width / order_reference_width`` so the edge roll-off keeps the same
    width in Hz for wider channels.
    """
    if order_reference_width is not None:
        order = max(1, int(round(order * channel_width / order_reference_width)))
    return FilterProfile(0.0, channel_width, order, insertion_loss)


@dataclass(frozen=True)
class DemuxPlan:
    """Named WSS output ports."""

    ports: dict

    def __post_init__(self):
        if len(set(self.ports)) != len(self.ports):
            raise ValueError("port names must be unique")

    def __getitem__(self, name: str) -> FilterProfile:
        return self.ports[name]

    def split(self, sig: SampledSignal) -> dict:
        return {name: apply_filter(sig, p) for name, p in self.ports.items()}

    def power_sum(self, f) -> np.ndarray:
        """Sum of port power responses (1.0 means lossless partition)."""
        return sum(p.response(f) ** 2 for p in self.ports.values())


def build_demux(allocation: Allocation, order: int = 4, insertion_loss: float = 0.0,
                guard_trim: float = 0.0, coherent_width: float | None = None,
                overlap_tolerance: float = 1e6, match_edges: bool = False) -> DemuxPlan:
    """WSS ports for the two ARoF signals and the coherent service.

    Ports abut: each ARoF port spans its whole free side region (less
    ``guard_trim`` on both edges) and the coherent port spans the coherent
    occupied width unless ``coherent_width`` overrides it.

    With ``match_edges`` the coherent port's order is scaled by its width over
    the ARoF port width, so all three edges roll off over the same span in Hz
    and the port power responses sum to nearly one across the abutments.
    """
    if not allocation.feasible:
        raise ValueError("cannot build a demux for an infeasible allocation")
    side_bw = allocation.free_per_side - 2 * guard_trim
    if side_bw <= 0:
        raise ValueError("guard_trim leaves no ARoF passband")
    coh_bw = allocation.plan.coherent_occupied if coherent_width is None else coherent_width
    coh_order = max(1, int(round(order * coh_bw / side_bw))) if match_edges else order
    ports = {
        "arof_low": FilterProfile(allocation.carrier_offset_low, side_bw, order, insertion_loss),
        "coherent": FilterProfile(0.0, coh_bw, coh_order, insertion_loss),
        "arof_high": FilterProfile(allocation.carrier_offset_high, side_bw, order, insertion_loss),
    }
    ordered = sorted(ports.values(), key=lambda p: p.center)
    for a, b in zip(ordered, ordered[1:]):
        overlap = a.edges[1] - b.edges[0]
        if overlap > overlap_tolerance:
            raise ValueError(f"WSS passbands overlap by {overlap / 1e9:.3f} GHz")
    return DemuxPlan(ports)

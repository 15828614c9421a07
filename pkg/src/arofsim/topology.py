"""End-to-end scenarios: two ARoF signals and a coherent service sharing one
ROADM channel, carried over topologies A/B/C and demultiplexed by a WSS."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .coherent import (COHERENT_PRESETS, CoherentConfig, QReport, coherent_reference_bits,
                       generate_coherent, receive_coherent, symbols_in_record)
from .filters import apply_filter, build_demux, roadm_profile
from .ofdm import EVM_LIMIT_64QAM, EvmReport, OfdmConfig, compute_evm, demodulate, modulate
from .optics import (EdfaParams, FiberParams, MzmParams, PdParams, edfa_amplify,
                     fiber_propagate, mzm_modulate, photodetect)
from .planner import PLAN_PRESETS, Allocation, allocate
from .signal import (SampledSignal, SpectrumEstimate, combine, estimate_psd,
                     frequency_shift, measure_power_dbm)

__all__ = [
    "Topology",
    "PlantParams",
    "ScenarioResult",
    "SweepCell",
    "TOPOLOGIES",
    "TOPOLOGY_ORDER",
    "NOMINAL_BANDWIDTHS",
    "DEFAULT_PLANT",
    "window_rate",
    "scenario_ofdm",
    "run_scenario",
    "run_cell",
    "sweep",
]

NOMINAL_BANDWIDTHS = (200e6, 400e6, 800e6, 1.6e9)


def window_rate(channel_width: float) -> float:
    """Composite-window sample rate: twice the channel width rounded up to a
    power of two in GS/s (128 GS/s for 50 GHz, 256 GS/s for 100 GHz)."""
    gs = 2 * channel_width / 1e9
    return float(2 ** math.ceil(math.log2(gs))) * 1e9


@dataclass(frozen=True)
class Topology:
    """Light path between the transmitters and the receive-side EDFA.

    ROADMs sit after spans ``0 .. roadm_count - 1``. ``baseline`` selects the
    back-to-back reference: each ARoF alone straight into its photodiode and the
    coherent signal alone into its receiver, with no WSS.
    """

    name: str
    spans: tuple[FiberParams, ...] = ()
    roadm_count: int = 0
    inline_amplifiers: bool = False
    baseline: bool = False

    def __post_init__(self):
        if self.roadm_count < 0 or self.roadm_count > max(len(self.spans), 0):
            raise ValueError("each ROADM must follow a fiber span")

    @property
    def total_length(self) -> float:
        return float(sum(s.length for s in self.spans))

    def with_fiber(self, attenuation: float, dispersion: float) -> "Topology":
        spans = tuple(replace(s, attenuation=attenuation, dispersion=dispersion)
                      for s in self.spans)
        return replace(self, spans=spans)


def _spans(*lengths: float) -> tuple[FiberParams, ...]:
    return tuple(FiberParams(length) for length in lengths)


TOPOLOGIES = {
    "baseline": Topology("baseline", baseline=True),
    "A": Topology("A", _spans(10)),
    "B": Topology("B", _spans(10, 25, 12), roadm_count=1),
    "C": Topology("C", _spans(10, 25, 25, 12), roadm_count=2),
}
TOPOLOGY_ORDER = ("baseline", "A", "B", "C")


@dataclass(frozen=True)
class PlantParams:
    """Every physical knob that the published experiment leaves unstated.

    ``pd_thermal_noise`` and the coherent ``transceiver_snr`` values are the
    ones fitted by :func:`arofsim.calibration.calibrate`.
    """

    # transmitters
    v_pi: float = 4.0
    mzm_bias: float = 0.5
    drive_rms: float = 0.15  # V
    laser_power: float = 4.0  # dBm per ECL
    second_arof_seed: int | None = None  # None: same IF payload on both lasers
    coherent_launch: float = 3.0  # dBm
    coupler_loss: float = 0.0  # dB, per coupler port
    # fiber plant
    attenuation: float = 0.2  # dB/km
    dispersion: float = 17.0  # ps/(nm km)
    # ROADM add/drop passband
    roadm_order: int = 4
    roadm_order_reference_width: float | None = 50e9
    roadm_insertion_loss: float = 0.0  # dB
    # receive-side EDFA; None restores the combined power to its launch level
    edfa_gain: float | None = None
    edfa_noise_figure: float = 5.0
    edfa_ase: bool = True
    # WSS demux
    wss_order: int = 4
    wss_insertion_loss: float = 2.0
    wss_guard_trim: float = 0.0
    wss_coherent_width: float | None = None
    # ARoF receiver
    pd_responsivity: float = 0.8
    pd_thermal_noise: float = 102.9e-12  # A/sqrt(Hz)
    pd_shot_noise: bool = False
    eq_smoothing: int = 9
    # coherent transponder noise floor per preset (dB)
    transceiver_snr: tuple[tuple[str, float], ...] = (("100G", 17.309), ("400G", 17.062))
    power_floor: float = -40.0  # dBm; below this a result is flagged

    @property
    def mzm(self) -> MzmParams:
        return MzmParams(self.v_pi, self.mzm_bias, self.drive_rms, self.laser_power)

    @property
    def pd(self) -> PdParams:
        return PdParams(self.pd_responsivity, self.pd_thermal_noise, self.pd_shot_noise)

    def transceiver_snr_for(self, preset: str) -> float | None:
        return dict(self.transceiver_snr).get(preset)


DEFAULT_PLANT = PlantParams()


@dataclass
class ScenarioResult:
    evm_low: EvmReport
    evm_high: EvmReport
    q_report: QReport
    power_ledger: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    psd: dict = field(default_factory=dict, repr=False)
    constellations: dict = field(default_factory=dict, repr=False)

    @property
    def pass_3gpp(self) -> tuple[bool, bool]:
        return self.evm_low.passed, self.evm_high.passed

    @property
    def evm_worst(self) -> float:
        return max(self.evm_low.evm_rms, self.evm_high.evm_rms)

    def as_dict(self) -> dict:
        return {
            "evm_low_pct": self.evm_low.evm_rms,
            "evm_high_pct": self.evm_high.evm_rms,
            "snr_low_db": self.evm_low.snr_equivalent,
            "snr_high_db": self.evm_high.snr_equivalent,
            "evm_limit_pct": self.evm_low.limit,
            "pass_3gpp": list(self.pass_3gpp),
            "coherent": self.q_report.as_dict(),
            "power_ledger": [dict(stage=s, kind=k, power_dbm=p) for s, k, p in self.power_ledger],
            "flags": list(self.flags),
        }


def scenario_ofdm(bandwidth: float, channel_width: float, n_symbols: int = 16,
                  seed: int = 0, **kw) -> OfdmConfig:
    """OFDM numerology synthesized directly at the composite-window rate."""
    return OfdmConfig.for_bandwidth(bandwidth, window_rate(channel_width), n_symbols=n_symbols,
                                    seed=seed, **kw)


def _arof_field(frame, plant: PlantParams) -> SampledSignal:
    return mzm_modulate(frame.tx_waveform, plant.mzm)


class _Ledger(list):
    def log(self, stage: str, kind: str, sig: SampledSignal):
        self.append((stage, kind, measure_power_dbm(sig)))


def _receive_arof(port: SampledSignal, frame, plant: PlantParams, rng, limit: float):
    elec = photodetect(port, plant.pd, rng)
    eq = demodulate(elec, frame, eq_smoothing=plant.eq_smoothing)
    return compute_evm(eq, frame.reference_symbols, limit), eq


def run_scenario(topology: Topology, coherent: CoherentConfig, ofdm: OfdmConfig,
                 allocation: Allocation, plant: PlantParams = DEFAULT_PLANT,
                 noise_seed: int = 0, evm_limit: float = EVM_LIMIT_64QAM,
                 capture: bool = False) -> ScenarioResult:
    """Simulate one scenario and collect EVM, Q and the power ledger.

    Deterministic for fixed configs and ``noise_seed``. With ``capture`` the
    result also carries launch/port PSDs and the equalized constellations.
    """
    if not allocation.feasible:
        raise ValueError(f"allocation is infeasible (deficit "
                         f"{allocation.deficit / 1e9:.3f} GHz); refusing to run")
    fs = window_rate(allocation.plan.channel_width)
    if ofdm.sample_rate != fs:
        raise ValueError(f"OFDM waveform rate {ofdm.sample_rate:g} Hz must equal the "
                         f"composite window rate {fs:g} Hz")
    rng = np.random.default_rng(noise_seed)
    n = ofdm.frame_len
    flags: list[str] = []
    ledger = _Ledger()
    psd: dict[str, SpectrumEstimate] = {}
    seg = min(n, 1 << 16)

    frame_low = modulate(ofdm)
    frame_high = frame_low if plant.second_arof_seed is None else modulate(
        replace(ofdm, seed=plant.second_arof_seed))
    arof_low = _arof_field(frame_low, plant)
    arof_high = arof_low if frame_high is frame_low else _arof_field(frame_high, plant)

    coh = generate_coherent(coherent, fs, n)
    coh = coh.replace(coh.samples * 10.0 ** (plant.coherent_launch / 20.0))
    bits = coherent_reference_bits(coherent, symbols_in_record(n, fs, coherent.baud))

    if topology.baseline:
        ledger.log("arof_tx", "source", arof_low)
        ledger.log("coherent_tx", "source", coh)
        ev_low, eq_low = _receive_arof(arof_low, frame_low, plant, rng, evm_limit)
        ev_high, eq_high = _receive_arof(arof_high, frame_high, plant, rng, evm_limit)
        q = receive_coherent(coh, coherent, bits, rng)
        if capture:
            psd["arof_tx"] = estimate_psd(arof_low, seg)
        result = ScenarioResult(ev_low, ev_high, q, list(ledger), flags, psd)
        if capture:
            result.constellations = {"low": (eq_low, frame_low.reference_symbols),
                                     "high": (eq_high, frame_high.reference_symbols)}
        return result

    low = frequency_shift(arof_low, allocation.carrier_offset_low)
    high = frequency_shift(arof_high, allocation.carrier_offset_high)
    field_ = combine([coh, low, high], plant.coupler_loss)
    launch = measure_power_dbm(field_)
    ledger.log("launch", "source", field_)
    if capture:
        psd["combined"] = estimate_psd(field_, seg)

    roadm = roadm_profile(allocation.plan.channel_width, plant.roadm_order,
                          plant.roadm_insertion_loss, plant.roadm_order_reference_width)
    for i, span in enumerate(topology.spans):
        field_ = fiber_propagate(field_, replace(span, attenuation=plant.attenuation,
                                                 dispersion=plant.dispersion))
        ledger.log(f"span{i}_{span.length:g}km", "passive", field_)
        if i < topology.roadm_count:
            field_ = apply_filter(field_, roadm)
            ledger.log(f"roadm{i}", "passive", field_)
            if topology.inline_amplifiers:
                gain = max(0.0, launch - measure_power_dbm(field_))
                field_ = edfa_amplify(field_, EdfaParams(gain, plant.edfa_noise_figure,
                                                             include_ase=plant.edfa_ase), rng)
                ledger.log(f"roadm{i}_amp", "amplifier", field_)

    p_in = measure_power_dbm(field_)
    if p_in < plant.power_floor:
        flags.append(f"power {p_in:.1f} dBm at the receive EDFA is below the "
                     f"{plant.power_floor:g} dBm floor")
    gain = plant.edfa_gain if plant.edfa_gain is not None else max(0.0, launch - p_in)
    field_ = edfa_amplify(field_, EdfaParams(gain, plant.edfa_noise_figure,
                                             include_ase=plant.edfa_ase), rng)
    ledger.log("rx_edfa", "amplifier", field_)

    demux = build_demux(allocation, plant.wss_order, plant.wss_insertion_loss,
                        plant.wss_guard_trim, plant.wss_coherent_width)
    ports = demux.split(field_)
    for name, sig in ports.items():
        ledger.log(f"wss_{name}", "passive", sig)
    if capture:
        psd["wss_arof_low"] = estimate_psd(ports["arof_low"], seg)
        psd["wss_arof_high"] = estimate_psd(ports["arof_high"], seg)

    ev_low, eq_low = _receive_arof(ports["arof_low"], frame_low, plant, rng, evm_limit)
    ev_high, eq_high = _receive_arof(ports["arof_high"], frame_high, plant, rng, evm_limit)
    accumulated = plant.dispersion * topology.total_length
    q = receive_coherent(ports["coherent"], coherent, bits, rng, cd_compensation=accumulated)
    result = ScenarioResult(ev_low, ev_high, q, list(ledger), flags, psd)
    if capture:
        result.constellations = {"low": (eq_low, frame_low.reference_symbols),
                                 "high": (eq_high, frame_high.reference_symbols)}
    return result


def _coherent_for(preset: str, plant: PlantParams) -> CoherentConfig:
    return replace(COHERENT_PRESETS[preset], transceiver_snr_db=plant.transceiver_snr_for(preset))


def run_cell(preset: str, topology: str | Topology, bandwidth: float,
             plant: PlantParams = DEFAULT_PLANT, seed: int = 0, n_symbols: int = 16,
             if_freq: float = 2e9, guard: float = 0.0, capture: bool = False,
             evm_limit: float = EVM_LIMIT_64QAM) -> ScenarioResult:
    """Run one (coherent preset, topology, ARoF bandwidth) cell with preset numerology.

    ``seed`` drives the OFDM payload, the coherent bits and all noise draws.
    """
    topo = TOPOLOGIES[topology] if isinstance(topology, str) else topology
    plan = replace(PLAN_PRESETS[preset], arof_bw=bandwidth, if_freq=if_freq, guard=guard)
    alloc = allocate(plan)
    ofdm = scenario_ofdm(bandwidth, plan.channel_width, n_symbols=n_symbols, seed=seed,
                         if_freq=if_freq)
    coh = replace(_coherent_for(preset, plant), seed=seed + 1)
    return run_scenario(topo, coh, ofdm, alloc, plant, noise_seed=seed + 2,
                        evm_limit=evm_limit, capture=capture)


@dataclass
class SweepCell:
    preset: str
    topology: str
    bandwidth: float
    seed: int
    result: ScenarioResult | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _run_cell_safe(args) -> SweepCell:
    preset, topo, bw, seed, plant, kw = args
    cell = SweepCell(preset, topo, bw, seed)
    try:
        cell.result = run_cell(preset, topo, bw, plant, seed=seed, **kw)
    except Exception as exc:  # per-cell failures are recorded, not raised
        cell.error = f"{type(exc).__name__}: {exc}"
    return cell


def sweep(topologies: Sequence[str] = TOPOLOGY_ORDER,
          bandwidths: Iterable[float] = NOMINAL_BANDWIDTHS,
          presets: Sequence[str] = ("100G", "400G"),
          plant: PlantParams = DEFAULT_PLANT, seeds: Sequence[int] = (0,),
          n_symbols: int = 16, jobs: int = 1, if_freq: float = 2e9, guard: float = 0.0,
          evm_limit: float = EVM_LIMIT_64QAM) -> list[SweepCell]:
    """Full Cartesian sweep; each cell owns its generators, so cells may run in
    any order or in parallel and still give identical results."""
    kw = dict(n_symbols=n_symbols, if_freq=if_freq, guard=guard, evm_limit=evm_limit)
    jobs_list = [(p, t, bw, s, plant, kw)
                 for p, t, bw, s in product(presets, topologies, list(bandwidths), seeds)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_cell_safe, jobs_list))
    return [_run_cell_safe(a) for a in jobs_list]


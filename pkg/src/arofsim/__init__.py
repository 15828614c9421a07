"""Simulation of analog radio-over-fiber (ARoF) IF-OFDM signals sharing a ROADM
channel with a coherent 100G/400G service.

Modules
-------
signal       sampled-signal container, power, PSD, AWGN, resampling
ofdm         IF-OFDM modem and EVM
coherent     DP-QPSK / DP-16QAM generation and BER/Q receiver
optics       MZM, fiber, EDFA, photodiode
filters      super-Gaussian ROADM/WSS passbands and the receive demux
planner      ARoF carrier placement in the free channel edges
topology     end-to-end scenarios and sweeps
calibration  fit of the plant to the back-to-back anchors
config       YAML scenario files with unit-checked quantities
reports      CSV/JSON writers and the run manifest
cli          ``arofsim`` command line
"""
__version__ = "0.1.0"

from .coherent import COHERENT_PRESETS, CoherentConfig, receive_coherent, generate_coherent
from .filters import FilterProfile, build_demux, cascade, cascade_bw_3db
from .ofdm import OfdmConfig, compute_evm, demodulate, modulate
from .optics import EdfaParams, FiberParams, MzmParams, PdParams
from .planner import PLAN_PRESETS, ChannelPlan, allocate, sweep_feasibility
from .signal import SampledSignal, estimate_psd, measure_power_dbm
from .topology import (DEFAULT_PLANT, TOPOLOGIES, PlantParams, run_cell, run_scenario,
                       sweep)

__all__ = [
    "__version__",
    "COHERENT_PRESETS", "CoherentConfig", "receive_coherent", "generate_coherent",
    "FilterProfile", "build_demux", "cascade", "cascade_bw_3db",
    "OfdmConfig", "compute_evm", "demodulate", "modulate",
    "EdfaParams", "FiberParams", "MzmParams", "PdParams",
    "PLAN_PRESETS", "ChannelPlan", "allocate", "sweep_feasibility",
    "SampledSignal", "estimate_psd", "measure_power_dbm",
    "DEFAULT_PLANT", "TOPOLOGIES", "PlantParams", "run_cell", "run_scenario", "sweep",
]

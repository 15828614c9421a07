"""Scenario configuration files: YAML with explicit units on every quantity.

A file names what to simulate and overrides any plant knob::

    scenario: 100G-topoB-800MHz        # preset, topology and ARoF bandwidth
    plant:
      laser_power: 6 dBm
      attenuation: 0.2 dB/km
      dispersion: 17 ps/nm/km
    seeds: [0, 1, 2]

Every physical quantity is a string with a unit suffix; bare numbers are
rejected for them, as are unknown keys. Units are matched case-insensitively,
so ``"50 ghz"`` and ``"50 GHz"`` are the same.
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any

import yaml

from .coherent import COHERENT_PRESETS, CoherentConfig
from .ofdm import EVM_LIMIT_64QAM, OfdmConfig
from .optics import FiberParams
from .planner import PLAN_PRESETS, Allocation, ChannelPlan, allocate
from .topology import (DEFAULT_PLANT, NOMINAL_BANDWIDTHS, TOPOLOGIES, TOPOLOGY_ORDER,
                       PlantParams, Topology, scenario_ofdm)

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "parse_config",
    "load_config",
    "dump_config",
    "parse_quantity",
    "format_quantity",
    "expand_scenario",
]


class ConfigError(ValueError):
    """Schema violation or contradictory settings in a scenario file."""


# unit spelling (lower case, spaces removed) -> scale to the SI value used internally
_UNITS = {
    "frequency": {"hz": "1", "khz": "1e3", "mhz": "1e6", "ghz": "1e9", "thz": "1e12"},
    "baud": {"bd": "1", "kbd": "1e3", "mbd": "1e6", "gbd": "1e9"},
    "length": {"km": "1", "m": "1e-3"},
    "db": {"db": "1"},
    "dbm": {"dbm": "1"},
    "attenuation": {"db/km": "1"},
    "dispersion": {"ps/nm/km": "1", "ps/(nm*km)": "1", "ps/(nmkm)": "1", "ps/nm.km": "1"},
    "voltage": {"v": "1", "mv": "1e-3"},
    "responsivity": {"a/w": "1"},
    "current_density": {"a/rthz": "1", "a/sqrt(hz)": "1", "pa/rthz": "1e-12",
                        "pa/sqrt(hz)": "1e-12", "na/rthz": "1e-9", "na/sqrt(hz)": "1e-9"},
    "percent": {"%": "1"},
    "fraction": {"": "1"},
}
# spelling used when writing a value back out
_CANONICAL = {
    "frequency": "GHz", "baud": "GBd", "length": "km", "db": "dB", "dbm": "dBm",
    "attenuation": "dB/km", "dispersion": "ps/nm/km", "voltage": "V",
    "responsivity": "A/W", "current_density": "pA/rtHz", "percent": "%", "fraction": "",
}
_NUMBER = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(.*?)\s*$")


def parse_quantity(text: Any, dim: str, key: str = "value") -> float:
    """``"50 GHz"`` -> ``50e9`` for ``dim='frequency'``; exact for decimal input."""
    if dim == "fraction" and isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    if not isinstance(text, str):
        raise ConfigError(f"{key}: expected a string with a {dim} unit "
                          f"(e.g. '1 {_CANONICAL[dim]}'), got {text!r}")
    m = _NUMBER.match(text)
    if not m:
        raise ConfigError(f"{key}: cannot read a number from {text!r}")
    unit = re.sub(r"\s+", "", m.group(2)).lower()
    scales = _UNITS[dim]
    if unit not in scales:
        raise ConfigError(f"{key}: unit {m.group(2)!r} is not a {dim} unit; "
                          f"use one of {sorted(scales)}")
    try:
        return float(Decimal(m.group(1)) * Decimal(scales[unit]))
    except InvalidOperation as exc:  # pragma: no cover - regex already filtered
        raise ConfigError(f"{key}: bad number in {text!r}") from exc


def format_quantity(value: float, dim: str, unit: str | None = None) -> str:
    unit = _CANONICAL[dim] if unit is None else unit
    scale = Decimal(_UNITS[dim][unit.replace(" ", "").lower()])
    num = Decimal(repr(float(value))) / scale
    s = format(num.normalize(), "f") if num == num.to_integral() else str(num.normalize())
    return f"{s} {unit}".strip()


@dataclass(frozen=True)
class _Field:
    kind: str  # a unit dimension, or "int", "bool", "str", "db_map", "length_list"
    default: Any
    optional: bool = False
    choices: tuple | None = None
    unit: str | None = None  # output spelling, if not the dimension's canonical one


def _plant_schema() -> dict:
    d = DEFAULT_PLANT
    return {
        "v_pi": _Field("voltage", d.v_pi),
        "mzm_bias": _Field("fraction", d.mzm_bias),
        "drive_rms": _Field("voltage", d.drive_rms),
        "laser_power": _Field("dbm", d.laser_power),
        "second_arof_seed": _Field("int", d.second_arof_seed, optional=True),
        "coherent_launch": _Field("dbm", d.coherent_launch),
        "coupler_loss": _Field("db", d.coupler_loss),
        "attenuation": _Field("attenuation", d.attenuation),
        "dispersion": _Field("dispersion", d.dispersion),
        "roadm_order": _Field("int", d.roadm_order),
        "roadm_order_reference_width": _Field("frequency", d.roadm_order_reference_width,
                                              optional=True),
        "roadm_insertion_loss": _Field("db", d.roadm_insertion_loss),
        "edfa_gain": _Field("db", d.edfa_gain, optional=True),
        "edfa_noise_figure": _Field("db", d.edfa_noise_figure),
        "edfa_ase": _Field("bool", d.edfa_ase),
        "wss_order": _Field("int", d.wss_order),
        "wss_insertion_loss": _Field("db", d.wss_insertion_loss),
        "wss_guard_trim": _Field("frequency", d.wss_guard_trim),
        "wss_coherent_width": _Field("frequency", d.wss_coherent_width, optional=True),
        "pd_responsivity": _Field("responsivity", d.pd_responsivity),
        "pd_thermal_noise": _Field("current_density", d.pd_thermal_noise),
        "pd_shot_noise": _Field("bool", d.pd_shot_noise),
        "eq_smoothing": _Field("int", d.eq_smoothing),
        "transceiver_snr": _Field("db_map", dict(d.transceiver_snr)),
        "power_floor": _Field("dbm", d.power_floor),
    }


_SCHEMA = {
    "coherent": {
        "preset": _Field("str", "100G", choices=tuple(COHERENT_PRESETS)),
        "baud": _Field("baud", None, optional=True),
        "format": _Field("str", None, optional=True, choices=("DP-QPSK", "DP-16QAM")),
        "rolloff": _Field("fraction", None, optional=True),
        "channel_width": _Field("frequency", None, optional=True),
        "occupied_width": _Field("frequency", None, optional=True),
    },
    "ofdm": {
        "bandwidth": _Field("frequency", 200e6, unit="MHz"),
        "if_freq": _Field("frequency", 2e9),
        "subcarrier_spacing": _Field("frequency", 1.5625e6, unit="MHz"),
        "qam_order": _Field("int", 64, choices=(4, 16, 64)),
        "n_symbols": _Field("int", 16),
        "n_training_symbols": _Field("int", 4),
        "cp_fraction": _Field("fraction", 1 / 16),
        "evm_limit": _Field("percent", EVM_LIMIT_64QAM),
    },
    "topology": {
        "name": _Field("str", "A", choices=TOPOLOGY_ORDER + ("custom",)),
        "spans": _Field("length_list", None, optional=True),
        "roadm_count": _Field("int", None, optional=True),
        "inline_amplifiers": _Field("bool", False),
    },
    "allocation": {
        "guard": _Field("frequency", 0.0),
        "feasible": _Field("bool", None, optional=True),
    },
    "plant": _plant_schema(),
    "sweep": {
        "presets": _Field("str_list", list(COHERENT_PRESETS)),
        "topologies": _Field("str_list", list(TOPOLOGY_ORDER)),
        "bandwidths": _Field("frequency_list", list(NOMINAL_BANDWIDTHS), unit="MHz"),
    },
}
_TOP_LEVEL = ("scenario", "seeds", "output") + tuple(_SCHEMA)

_SCENARIO = re.compile(r"^(?P<preset>100G|400G)-topo(?P<topo>A|B|C|baseline)-"
                       r"(?P<bw>\d+(?:\.\d+)?)\s*(?P<unit>MHz|GHz)$", re.IGNORECASE)


def expand_scenario(name: str) -> dict:
    """``"100G-topoB-800MHz"`` -> section overrides for preset, topology and bandwidth."""
    m = _SCENARIO.match(name.strip())
    if not m:
        raise ConfigError(f"scenario: {name!r} does not match '<100G|400G>-topo<A|B|C|baseline>-"
                          f"<bandwidth><MHz|GHz>'")
    topo = m.group("topo")
    topo = "baseline" if topo.lower() == "baseline" else topo.upper()
    return {
        "coherent": {"preset": m.group("preset").upper()},
        "topology": {"name": topo},
        "ofdm": {"bandwidth": f"{m.group('bw')} {m.group('unit')}"},
    }


def _parse_value(raw: Any, f: _Field, key: str):
    if raw is None:
        if f.optional:
            return None
        raise ConfigError(f"{key}: a value is required")
    kind = f.kind
    if kind == "int":
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ConfigError(f"{key}: expected an integer, got {raw!r}")
        val = raw
    elif kind == "bool":
        if not isinstance(raw, bool):
            raise ConfigError(f"{key}: expected true or false, got {raw!r}")
        val = raw
    elif kind == "str":
        if not isinstance(raw, str):
            raise ConfigError(f"{key}: expected a string, got {raw!r}")
        val = raw
    elif kind == "str_list":
        if not isinstance(raw, list) or not all(isinstance(x, str) for x in raw):
            raise ConfigError(f"{key}: expected a list of strings")
        val = list(raw)
    elif kind in ("length_list", "frequency_list"):
        dim = kind.split("_")[0]
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"{key}: expected a non-empty list of {dim} values")
        val = [parse_quantity(x, dim, f"{key}[{i}]") for i, x in enumerate(raw)]
    elif kind == "db_map":
        if not isinstance(raw, dict):
            raise ConfigError(f"{key}: expected a mapping of preset name to dB")
        val = {str(k): parse_quantity(v, "db", f"{key}.{k}") for k, v in raw.items()}
    else:
        val = parse_quantity(raw, kind, key)
    if f.choices is not None:
        items = val if isinstance(val, list) else [val]
        bad = [x for x in items if x not in f.choices]
        if bad:
            raise ConfigError(f"{key}: {bad[0]!r} is not one of {list(f.choices)}")
    return val


def _format_value(val: Any, f: _Field):
    if val is None or f.kind in ("int", "bool", "str"):
        return val
    if f.kind == "str_list":
        return list(val)
    if f.kind in ("length_list", "frequency_list"):
        return [format_quantity(x, f.kind.split("_")[0], f.unit) for x in val]
    if f.kind == "db_map":
        return {k: format_quantity(v, "db") for k, v in sorted(val.items())}
    if f.kind == "fraction":
        return float(val)
    return format_quantity(val, f.kind, f.unit)


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved scenario, every quantity in SI (Hz, km, dB, dBm, V, A).

    ``sections`` maps section name to ``{key: value}``; ``provenance`` maps
    ``"section.key"`` to ``"default"``, ``"scenario"`` or ``"user"`` and is not
    part of equality.
    """

    sections: dict
    seeds: tuple[int, ...] = (0,)
    output: str | None = None
    scenario: str | None = field(default=None, compare=False)
    provenance: dict = field(default_factory=dict, compare=False, repr=False)

    def __getitem__(self, section: str) -> dict:
        return self.sections[section]

    # ------------------------------------------------------------------ builders
    def plant(self) -> PlantParams:
        p = dict(self.sections["plant"])
        p["transceiver_snr"] = tuple(sorted(p["transceiver_snr"].items()))
        return PlantParams(**p)

    def coherent(self) -> CoherentConfig:
        c = self.sections["coherent"]
        base = COHERENT_PRESETS[c["preset"]]
        over = {k: c[k] for k in ("baud", "format", "rolloff", "channel_width")
                if c[k] is not None}
        if c["occupied_width"] is None and ("baud" in over or "rolloff" in over):
            over["occupied_width"] = None  # re-derive from baud and rolloff
        elif c["occupied_width"] is not None:
            over["occupied_width"] = c["occupied_width"]
        snr = self.sections["plant"]["transceiver_snr"].get(c["preset"])
        return replace(base, transceiver_snr_db=snr, **over)

    def channel_plan(self) -> ChannelPlan:
        coh = self.coherent()
        o = self.sections["ofdm"]
        return ChannelPlan(coh.channel_width, coh.occupied_width, o["if_freq"], o["bandwidth"],
                           self.sections["allocation"]["guard"])

    def allocation(self) -> Allocation:
        return allocate(self.channel_plan())

    def ofdm(self, seed: int = 0) -> OfdmConfig:
        o = self.sections["ofdm"]
        return scenario_ofdm(o["bandwidth"], self.coherent().channel_width,
                             n_symbols=o["n_symbols"], seed=seed, if_freq=o["if_freq"],
                             sc_spacing=o["subcarrier_spacing"], qam_order=o["qam_order"],
                             n_training_symbols=o["n_training_symbols"],
                             cp_fraction=o["cp_fraction"])

    def topology(self) -> Topology:
        t = self.sections["topology"]
        plant = self.sections["plant"]
        if t["name"] == "custom":
            spans = tuple(FiberParams(L) for L in t["spans"])
            topo = Topology("custom", spans, t["roadm_count"] or 0, t["inline_amplifiers"])
        else:
            topo = replace(TOPOLOGIES[t["name"]], inline_amplifiers=t["inline_amplifiers"])
        return topo.with_fiber(plant["attenuation"], plant["dispersion"])

    # ------------------------------------------------------------ serialization
    def to_dict(self) -> dict:
        out: dict = {}
        for name, schema in _SCHEMA.items():
            out[name] = {k: _format_value(self.sections[name][k], f) for k, f in schema.items()}
        out["seeds"] = list(self.seeds)
        if self.output is not None:
            out["output"] = self.output
        return out

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form; the provenance is not hashed."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def parse_config(data: dict | None) -> ScenarioConfig:
    """Validate a mapping (as loaded from YAML) and resolve defaults."""
    data = {} if data is None else data
    if not isinstance(data, dict):
        raise ConfigError("top level of a scenario file must be a mapping")
    unknown = sorted(set(data) - set(_TOP_LEVEL))
    if unknown:
        raise ConfigError(f"unknown top-level key {unknown[0]!r}; allowed: {list(_TOP_LEVEL)}")
    scenario = data.get("scenario")
    from_scenario = expand_scenario(scenario) if scenario is not None else {}

    sections: dict = {}
    provenance: dict = {}
    for name, schema in _SCHEMA.items():
        user = data.get(name) or {}
        if not isinstance(user, dict):
            raise ConfigError(f"{name}: expected a mapping")
        bad = sorted(set(user) - set(schema))
        if bad:
            raise ConfigError(f"{name}.{bad[0]}: unknown key; allowed: {sorted(schema)}")
        preset = from_scenario.get(name, {})
        values = {}
        for key, f in schema.items():
            path = f"{name}.{key}"
            if key in user:
                values[key] = _parse_value(user[key], f, path)
                provenance[path] = "user"
            elif key in preset:
                values[key] = _parse_value(preset[key], f, path)
                provenance[path] = "scenario"
            else:
                values[key] = (dict(f.default) if isinstance(f.default, dict)
                               else list(f.default) if isinstance(f.default, list)
                               else f.default)
                provenance[path] = "default"
        sections[name] = values

    seeds = data.get("seeds", [0])
    if isinstance(seeds, int) and not isinstance(seeds, bool):
        seeds = [seeds]
    if (not isinstance(seeds, list) or not seeds
            or not all(isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in seeds)):
        raise ConfigError("seeds: expected a non-negative integer or a list of them")
    provenance["seeds"] = "user" if "seeds" in data else "default"
    output = data.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output: expected a directory path string")

    cfg = ScenarioConfig(sections, tuple(seeds), output, scenario, provenance)
    _check_consistency(cfg)
    return cfg


def _check_consistency(cfg: ScenarioConfig) -> None:
    t = cfg["topology"]
    if t["name"] == "custom":
        if t["spans"] is None:
            raise ConfigError("topology.spans: required for a custom topology")
        if (t["roadm_count"] or 0) > len(t["spans"]):
            raise ConfigError("topology.roadm_count: more ROADMs than spans")
    elif t["spans"] is not None or t["roadm_count"] is not None:
        raise ConfigError(f"topology.spans/roadm_count: only allowed when name is 'custom', "
                          f"not {t['name']!r}")
    try:
        coh = cfg.coherent()
        alloc = cfg.allocation()
        cfg.ofdm()
        cfg.plant()
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    declared = cfg["allocation"]["feasible"]
    if declared is not None and declared != alloc.feasible:
        raise ConfigError(
            f"allocation.feasible: declared {declared} but the plan is "
            f"{'feasible' if alloc.feasible else 'infeasible'} (slack "
            f"{alloc.slack / 1e9:.3f} GHz for {coh.occupied_width / 1e9:g} GHz coherent in "
            f"{coh.channel_width / 1e9:g} GHz)")
    unknown = sorted(set(cfg["sweep"]["topologies"]) - set(TOPOLOGY_ORDER))
    if unknown:
        raise ConfigError(f"sweep.topologies: {unknown[0]!r} is not one of {list(TOPOLOGY_ORDER)}")
    unknown = sorted(set(cfg["sweep"]["presets"]) - set(PLAN_PRESETS))
    if unknown:
        raise ConfigError(f"sweep.presets: {unknown[0]!r} is not one of {list(PLAN_PRESETS)}")


def load_config(path: str | Path | None) -> ScenarioConfig:
    """Read a YAML scenario file; ``None`` gives the all-defaults config."""
    if path is None:
        return parse_config({})
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file {str(p)!r} does not exist")
    try:
        data = yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{p}: not well-formed YAML ({exc})") from exc
    return parse_config(data)


def dump_config(cfg: ScenarioConfig) -> str:
    """Canonical YAML text; ``parse_config(yaml.safe_load(dump_config(c))) == c``."""
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False, default_flow_style=False)

"""Command-line entry points: ``arofsim plan|run|sweep|calibrate``.

Every command writes its data files and a ``manifest.json`` into ``--out``.
On failure the exit status is nonzero and a JSON error object goes to stderr
(and to ``error.json`` in the output directory when it can be created).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .calibration import calibrate
from .coherent import COHERENT_PRESETS
from .config import (ConfigError, ScenarioConfig, dump_config, expand_scenario, load_config,
                     parse_config)
from .planner import PLAN_PRESETS, sweep_feasibility
from .reports import (RunManifest, write_constellation, write_evm_matrix, write_feasibility,
                      write_json, write_psd, write_result, write_sweep_cells)
from .topology import run_scenario, sweep

__all__ = ["main", "build_parser"]

DEFAULT_OUT = "arofsim-out"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML scenario file")
    common.add_argument("--out", metavar="DIR", help=f"output directory (default {DEFAULT_OUT})")
    common.add_argument("--seed", type=int, metavar="N", help="run with this single seed")
    common.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="worker processes for sweeps (default 1)")
    common.add_argument("--preset", metavar="NAME",
                        help="coherent preset (100G, 400G) or scenario such as 100G-topoB-800MHz")

    p = argparse.ArgumentParser(prog="arofsim", description="ARoF + coherent co-transmission "
                                "simulator for shared ROADM channels")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("plan", parents=[common], help="spectrum feasibility table")
    sub.add_parser("run", parents=[common], help="one scenario: result JSON, PSD and "
                   "constellation CSVs")
    sub.add_parser("sweep", parents=[common], help="EVM matrix over presets, topologies and "
                   "bandwidths")
    sub.add_parser("calibrate", parents=[common], help="fit the plant to the back-to-back anchors")
    return p


def _resolve_config(args) -> ScenarioConfig:
    cfg = load_config(args.config)
    if args.preset is None and args.seed is None:
        return cfg
    data = cfg.to_dict()
    if args.preset is not None:
        if args.preset.upper() in COHERENT_PRESETS:
            name = args.preset.upper()
            data["coherent"]["preset"] = name
            data["sweep"]["presets"] = [name]
        else:
            over = expand_scenario(args.preset)
            for section, values in over.items():
                data[section].update(values)
            data["sweep"]["presets"] = [over["coherent"]["preset"]]
            data["sweep"]["topologies"] = [over["topology"]["name"]]
            data["sweep"]["bandwidths"] = [over["ofdm"]["bandwidth"]]
    if args.seed is not None:
        data["seeds"] = [args.seed]
    return parse_config(data)


def _cmd_plan(cfg: ScenarioConfig, out: Path, manifest: RunManifest, jobs: int) -> dict:
    o, guard = cfg["ofdm"], cfg["allocation"]["guard"]
    summary = {}
    for preset in cfg["sweep"]["presets"]:
        plan = replace(PLAN_PRESETS[preset], if_freq=o["if_freq"], guard=guard)
        table = sweep_feasibility(plan, cfg["sweep"]["bandwidths"])
        path = write_feasibility(out / f"feasibility_{preset}.csv", table, preset,
                                 cfg.config_hash())
        manifest.add_file(path, out)
        manifest.add_cell(f"plan/{preset}", "ok")
        summary[preset] = {"free_total_ghz": plan.free_total / 1e9,
                           "max_feasible_bw_mhz": table.max_feasible_bw / 1e6}
    return summary


def _cmd_run(cfg: ScenarioConfig, out: Path, manifest: RunManifest, jobs: int) -> dict:
    seed = cfg.seeds[0]
    coh = replace(cfg.coherent(), seed=seed + 1)
    result = run_scenario(cfg.topology(), coh, cfg.ofdm(seed), cfg.allocation(), cfg.plant(),
                          noise_seed=seed + 2, evm_limit=cfg["ofdm"]["evm_limit"], capture=True)
    h = cfg.config_hash()
    meta = {"config_hash": h, "seed": seed, "preset": cfg["coherent"]["preset"],
            "topology": cfg["topology"]["name"], "bw_mhz": cfg["ofdm"]["bandwidth"] / 1e6}
    files = [write_result(out / "result.json", result, meta)]
    for name, psd in result.psd.items():
        files.append(write_psd(out / f"psd_{name}.csv", psd, h))
    for name, (eq, ref) in result.constellations.items():
        files.append(write_constellation(out / f"constellation_{name}.csv", eq, ref, h))
    for f in files:
        manifest.add_file(f, out)
    manifest.add_cell(f"{meta['preset']}/{meta['topology']}/{meta['bw_mhz']:g}MHz/seed{seed}",
                      "flagged" if result.flags else "ok", "; ".join(result.flags) or None)
    return {"evm_low_pct": result.evm_low.evm_rms, "evm_high_pct": result.evm_high.evm_rms,
            "q_db": result.q_report.q_db, "pass_3gpp": list(result.pass_3gpp)}


def _cmd_sweep(cfg: ScenarioConfig, out: Path, manifest: RunManifest, jobs: int) -> dict:
    s, o = cfg["sweep"], cfg["ofdm"]
    cells = sweep(s["topologies"], s["bandwidths"], s["presets"], cfg.plant(), cfg.seeds,
                  n_symbols=o["n_symbols"], jobs=jobs, if_freq=o["if_freq"],
                  guard=cfg["allocation"]["guard"], evm_limit=o["evm_limit"])
    h = cfg.config_hash()
    for path in (write_evm_matrix(out / "evm_matrix.csv", cells, h, o["evm_limit"]),
                 write_sweep_cells(out / "sweep_cells.csv", cells, h)):
        manifest.add_file(path, out)
    for c in cells:
        manifest.add_cell(f"{c.preset}/{c.topology}/{c.bandwidth / 1e6:g}MHz/seed{c.seed}",
                          "ok" if c.ok else "error", c.error)
    return {"cells": len(cells), "failed": sum(not c.ok for c in cells)}


def _cmd_calibrate(cfg: ScenarioConfig, out: Path, manifest: RunManifest, jobs: int) -> dict:
    res = calibrate(cfg.plant(), seed=cfg.seeds[0])
    body = {"config_hash": cfg.config_hash(), **res.as_dict()}
    manifest.add_file(write_json(out / "calibration.json", body), out)
    # the same config with the fitted values, ready to pass back with --config
    data = cfg.to_dict()
    data["plant"]["pd_thermal_noise"] = f"{res.plant.pd_thermal_noise * 1e12:.1f} pA/rtHz"
    data["plant"]["transceiver_snr"] = {k: f"{v:g} dB" for k, v in res.plant.transceiver_snr}
    path = out / "calibrated.yaml"
    path.write_text(dump_config(parse_config(data)))
    manifest.add_file(path, out)
    manifest.add_cell("calibrate", "ok")
    return res.as_dict()


_COMMANDS = {"plan": _cmd_plan, "run": _cmd_run, "sweep": _cmd_sweep, "calibrate": _cmd_calibrate}


def _fail(command: str, exc: BaseException, out: Path | None) -> int:
    err = {"error": type(exc).__name__, "message": str(exc), "command": command}
    text = json.dumps(err, sort_keys=True)
    print(text, file=sys.stderr)
    if out is not None:
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "error.json").write_text(text + "\n")
        except OSError:
            pass
    return 2 if isinstance(exc, ConfigError) else 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out) if args.out else None
    try:
        cfg = _resolve_config(args)
        if out is None:
            out = Path(cfg.output or DEFAULT_OUT)
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        out.mkdir(parents=True, exist_ok=True)
        started = datetime.now(timezone.utc)
        t0 = time.perf_counter()
        manifest = RunManifest(args.command, cfg.config_hash(), list(cfg.seeds), __version__,
                               started.isoformat(timespec="seconds"))
        (out / "config.yaml").write_text(dump_config(cfg))
        manifest.add_file(out / "config.yaml", out)
        summary = _COMMANDS[args.command](cfg, out, manifest, args.jobs)
        manifest.wall_clock_s = round(time.perf_counter() - t0, 3)
        manifest.write(out / "manifest.json")
    except Exception as exc:  # report every failure as machine-readable JSON
        return _fail(args.command, exc, out)
    print(json.dumps({"command": args.command, "out": str(out), **summary}, sort_keys=True))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""CSV and JSON report writers plus the run manifest.

Every CSV starts with ``#`` comment lines carrying the schema version, the
table kind and the config hash, followed by a normal header row, so
``pandas.read_csv(path, comment="#")`` or ``numpy.genfromtxt`` read it directly.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .planner import FeasibilityTable
from .signal import SpectrumEstimate
from .topology import ScenarioResult, SweepCell

__all__ = [
    "SCHEMA_VERSION",
    "EVM_MATRIX_COLUMNS",
    "write_csv",
    "read_csv",
    "write_json",
    "to_json",
    "write_evm_matrix",
    "write_sweep_cells",
    "write_psd",
    "write_constellation",
    "write_feasibility",
    "write_result",
    "RunManifest",
    "sha256_file",
]

SCHEMA_VERSION = "1"
EVM_MATRIX_COLUMNS = ("preset", "topology", "bw_mhz", "evm_low_pct", "evm_high_pct", "q_db",
                      "pass_3gpp")


def _clean(obj):
    """Make a value JSON-safe: arrays to lists, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def to_json(obj) -> str:
    """Deterministic JSON text (sorted keys, fixed indentation, trailing newline)."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path: str | Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(obj))
    return path


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: str | Path, kind: str, columns: Sequence[str], rows: Iterable[Sequence],
              config_hash: str | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        fh.write(f"# schema_version: {SCHEMA_VERSION}\n")
        fh.write(f"# kind: {kind}\n")
        if config_hash is not None:
            fh.write(f"# config_hash: {config_hash}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path: str | Path) -> tuple[dict, list[dict]]:
    """Return ``(header_meta, rows)``; values stay strings."""
    meta, lines = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].partition(":")
            meta[key.strip()] = val.strip()
        else:
            lines.append(line)
    return meta, list(csv.DictReader(lines))


def _pass_pair(low: bool, high: bool) -> str:
    return f"{_fmt(low)}/{_fmt(high)}"


def write_evm_matrix(path, cells: Sequence[SweepCell], config_hash: str | None = None,
                     evm_limit: float | None = None) -> Path:
    """The EVM-versus-bandwidth matrix, one row per (preset, topology, bandwidth).

    With several seeds the EVMs and Q are seed means and ``pass_3gpp`` is judged
    on the means; cells that failed are left out of the mean (see the per-cell
    table for their errors). ``pass_3gpp`` is written ``low/high``.
    """
    groups: dict = {}
    for c in cells:
        groups.setdefault((c.preset, c.topology, c.bandwidth), []).append(c)
    rows = []
    for (preset, topo, bw), group in groups.items():
        ok = [c.result for c in group if c.ok]
        if not ok:
            rows.append((preset, topo, bw / 1e6, "nan", "nan", "nan", "error"))
            continue
        low = float(np.mean([r.evm_low.evm_rms for r in ok]))
        high = float(np.mean([r.evm_high.evm_rms for r in ok]))
        q = float(np.mean([r.q_report.q_db for r in ok]))
        limit = ok[0].evm_low.limit if evm_limit is None else evm_limit
        rows.append((preset, topo, bw / 1e6, low, high, q, _pass_pair(low <= limit, high <= limit)))
    return write_csv(path, "evm_matrix", EVM_MATRIX_COLUMNS, rows, config_hash)


def write_sweep_cells(path, cells: Sequence[SweepCell], config_hash: str | None = None) -> Path:
    """Per-seed cell table, including failures."""
    cols = EVM_MATRIX_COLUMNS + ("seed", "status", "error")
    rows = []
    for c in cells:
        if c.ok:
            r = c.result
            rows.append((c.preset, c.topology, c.bandwidth / 1e6, r.evm_low.evm_rms,
                         r.evm_high.evm_rms, r.q_report.q_db, _pass_pair(*r.pass_3gpp),
                         c.seed, "ok", ""))
        else:
            rows.append((c.preset, c.topology, c.bandwidth / 1e6, "nan", "nan", "nan", "error",
                         c.seed, "error", c.error))
    return write_csv(path, "sweep_cells", cols, rows, config_hash)


def write_psd(path, psd: SpectrumEstimate, config_hash: str | None = None) -> Path:
    rows = zip(psd.frequencies / 1e9, psd.psd)
    return write_csv(path, "psd", ("freq_ghz", "psd_dbm_per_hz"), rows, config_hash)


def write_constellation(path, equalized, reference, config_hash: str | None = None) -> Path:
    r = np.asarray(equalized).ravel()
    s = np.asarray(reference).ravel()
    rows = zip(r.real, r.imag, s.real, s.imag)
    return write_csv(path, "constellation", ("i", "q", "ref_i", "ref_q"), rows, config_hash)


def write_feasibility(path, table: FeasibilityTable, preset: str | None = None,
                      config_hash: str | None = None) -> Path:
    recs = table.as_records()
    cols = ("preset",) + tuple(recs[0]) if recs else ("preset",)
    rows = [(preset or "",) + tuple(r.values()) for r in recs]
    return write_csv(path, "feasibility", cols, rows, config_hash)


def write_result(path, result: ScenarioResult, meta: dict | None = None) -> Path:
    """One scenario's metrics as JSON; byte-identical for identical inputs."""
    body = result.as_dict()
    if meta:
        body = {**meta, **body}
    return write_json(path, body)


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """What ran, with which config and seeds, and a checksum for every output."""

    command: str
    config_hash: str
    seeds: list
    version: str
    started: str = ""
    wall_clock_s: float = 0.0
    cells: list = field(default_factory=list)
    files: list = field(default_factory=list)

    def add_file(self, path: Path, root: Path) -> None:
        path = Path(path)
        self.files.append({"path": str(path.relative_to(root)), "sha256": sha256_file(path),
                           "bytes": path.stat().st_size})

    def add_cell(self, name: str, status: str, error: str | None = None) -> None:
        entry = {"cell": name, "status": status}
        if error:
            entry["error"] = error
        self.cells.append(entry)

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config_hash": self.config_hash,
            "seeds": list(self.seeds),
            "version": self.version,
            "started": self.started,
            "wall_clock_s": self.wall_clock_s,
            "cells": list(self.cells),
            "files": sorted(self.files, key=lambda f: f["path"]),
        }

    def write(self, path: str | Path) -> Path:
        return write_json(path, self.as_dict())
